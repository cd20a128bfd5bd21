#include "refinery/text.hpp"

#include "refinery/utf8.hpp"

namespace refinery::text {

bool is_horizontal_space(char32_t cp) {
    switch (cp) {
        case 0x0009:
        case 0x0020:
        case 0x00A0:
        case 0x1680:
        case 0x202F:
        case 0x205F:
        case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_newline(char32_t cp) {
    return (cp >= 0x000A && cp <= 0x000D) || cp == 0x0085 || cp == 0x2028 || cp == 0x2029;
}

bool is_letter(char32_t cp) {
    if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z');
    if (cp == 0x00AA || cp == 0x00B5 || cp == 0x00BA) return true;
    if (cp >= 0x00C0 && cp <= 0x024F) return cp != 0x00D7 && cp != 0x00F7;
    if (cp == 0x200C || cp == 0x200D) return true;
    if (cp >= 0x0610 && cp <= 0x061A) return true;  // honorific marks
    if (cp >= 0x0620 && cp <= 0x065F) return cp != 0x0640;
    if (cp >= 0x066E && cp <= 0x06D3) return true;
    if (cp == 0x06D5) return true;
    if (cp >= 0x06D6 && cp <= 0x06ED) return cp != 0x06DD && cp != 0x06DE && cp != 0x06E9;
    if (cp >= 0x06EE && cp <= 0x06EF) return true;
    if (cp >= 0x06FA && cp <= 0x06FC) return true;
    if (cp == 0x06FF) return true;
    if (cp >= 0x0750 && cp <= 0x077F) return true;
    if (cp >= 0x08A0 && cp <= 0x08FF) return true;
    if (cp >= 0xFB50 && cp <= 0xFDFF) return cp != 0xFD3E && cp != 0xFD3F && cp != 0xFDFC && cp != 0xFDFD;
    if (cp >= 0xFE70 && cp <= 0xFEFC) return true;
    return false;
}

bool is_digit(char32_t cp) {
    return (cp >= '0' && cp <= '9') || (cp >= 0x0660 && cp <= 0x0669) || (cp >= 0x06F0 && cp <= 0x06F9);
}

bool is_persian_char(char32_t cp) {
    return (cp >= 0x0600 && cp <= 0x06FF) || (cp >= 0x0750 && cp <= 0x077F) ||
           (cp >= 0xFB50 && cp <= 0xFDFF) || (cp >= 0xFE70 && cp <= 0xFEFF) || cp == kZwnj;
}

CharClass classify(char32_t cp) {
    if (is_newline(cp)) return CharClass::Newline;
    if (is_horizontal_space(cp)) return CharClass::Space;
    if (is_letter(cp)) return CharClass::Letter;
    if (is_digit(cp)) return CharClass::Digit;
    return CharClass::Symbol;
}

std::vector<std::u32string_view> tokens(std::u32string_view s) {
    std::vector<std::u32string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) ++i;
        const std::size_t start = i;
        while (i < s.size() && !is_space(s[i])) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

namespace {

template <typename View>
std::vector<View> split_lines(View s) {
    std::vector<View> out;
    std::size_t start = 0;
    while (start < s.size()) {
        std::size_t end = s.find('\n', start);
        if (end == View::npos) end = s.size();
        out.push_back(s.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

}  // namespace

std::vector<std::u32string_view> lines(std::u32string_view s) { return split_lines(s); }
std::vector<std::string_view> lines(std::string_view s) { return split_lines(s); }

bool is_word(std::u32string_view token) {
    for (char32_t cp : token) {
        if (is_letter(cp) && cp != 0x200C && cp != 0x200D) return true;
    }
    return false;
}

std::u32string_view word_core(std::u32string_view token) {
    const auto keep = [](char32_t cp) { return is_letter(cp) || is_digit(cp); };
    std::size_t b = 0;
    std::size_t e = token.size();
    while (b < e && !keep(token[b])) ++b;
    while (e > b && !keep(token[e - 1])) --e;
    return token.substr(b, e - b);
}

std::vector<std::u32string_view> words(std::u32string_view s) {
    std::vector<std::u32string_view> out;
    for (auto tok : tokens(s)) {
        if (is_word(tok)) out.push_back(word_core(tok));
    }
    return out;
}

std::size_t word_count(std::u32string_view s) {
    std::size_t n = 0;
    for (auto tok : tokens(s)) n += is_word(tok) ? 1 : 0;
    return n;
}

std::size_t word_count(std::string_view utf8) { return word_count(utf8::decode(utf8)); }

std::string_view trim(std::string_view s) {
    const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && ws(s[b])) ++b;
    while (e > b && ws(s[e - 1])) --e;
    return s.substr(b, e - b);
}

std::u32string_view trim(std::u32string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

}  // namespace refinery::text
