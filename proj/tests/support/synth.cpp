#include "synth.hpp"

#include <array>
#include <cstdio>

#include "refinery/utf8.hpp"

namespace refinery::synth {

const std::vector<std::string>& content_words() {
    static const std::vector<std::string> words = {
        "کتاب",    "دانشگاه", "پژوهش",   "تاریخ",   "فرهنگ",   "زبان",     "شهر",     "کشور",    "مردم",
        "دولت",    "اقتصاد",  "بازار",   "قیمت",    "خانه",    "خانواده",  "کودک",    "مدرسه",   "معلم",
        "دانش",    "علم",     "فناوری",  "رایانه",  "نرم‌افزار", "شبکه",     "اینترنت", "سامانه",  "داده",
        "نوشته",   "مقاله",   "نویسنده", "شاعر",    "شعر",     "ادبیات",   "هنر",     "موسیقی",  "فیلم",
        "سینما",   "ورزش",    "فوتبال",  "بازیکن",  "تیم",     "مسابقه",   "پیروزی",  "سلامت",   "بیمار",
        "پزشک",    "درمان",   "دارو",    "بیمارستان", "غذا",    "آب",       "هوا",     "زمین",    "دریا",
        "کوه",     "جنگل",    "باران",   "برف",     "آفتاب",   "ماه",      "ستاره",   "آسمان",   "سفر",
        "سبزه",     "خیابان",  "ماشین",   "قطار",    "هواپیما", "فرودگاه",  "ایستگاه", "مسافر",   "کار",
        "کارگر",   "کارخانه", "تولید",   "صنعت",    "کشاورزی", "محصول",    "صادرات",  "واردات",  "پول",
        "بانک",    "سرمایه",  "سود",     "هزینه",   "درآمد",   "مالیات",   "قانون",   "دادگاه",  "حقوق",
        "آزادی",   "جامعه",   "سیاست",   "انتخابات", "مجلس",    "وزیر",     "رئیس",    "مدیر",    "کارمند",
        "اداره",   "سازمان",  "برنامه",  "طرح",     "پروژه",   "گزارش",    "خبر",     "روزنامه", "مجله",
        "رسانه",   "تلویزیون", "رادیو",  "گفتگو",   "پرسش",    "پاسخ",     "پرنده",     "اندیشه",  "فلسفه",
        "دین",     "اخلاق",   "تاریخچه", "باستان",  "میراث",   "موزه",     "کتابخانه", "دانشجو", "استاد",
        "آزمایش",  "نتیجه",   "روش",     "مسئله",   "راه‌حل",   "تحلیل",    "بررسی",   "آینده",   "گذشته",
        "زندگی",   "جوان",    "پیر",     "دوست",    "همسایه",  "روستا",    "استان",   "منطقه",   "مرز",
        "جهان",    "انسان",   "طبیعت",   "گیاه",    "درخت",    "گل",       "باغ",     "میوه",    "نان",
        "چای",     "قهوه",    "شیرینی",  "لباس",    "کفش",     "فروشگاه",  "خرید",    "فروش",    "مشتری",
        "کیفیت",   "ارزش",    "زیبایی",  "رنگ",     "نور",     "صدا",      "تصویر",   "عکس",     "نقاشی",
        "داستان",  "رمان",    "قصه",     "افسانه",  "حافظ",    "سعدی",     "فردوسی",  "مولوی",   "خیام",
        "نوروز",   "جشن",     "سنت",     "آیین",    "باور",    "امید",     "شادی",    "غم",      "عشق",
        "کبوتر",    "کوچک",    "خوب",     "زیبا",    "تازه",    "قدیمی",    "مهم",     "ساده",    "دشوار",
        "می‌رود",   "می‌آید",   "شتر",  "می‌نویسد", "می‌خواند", "می‌سازد",   "می‌داند",  "نوشت",    "خواند",
        "رفت",     "آمد",     "ماهی",     "ساخت",    "دید",     "شنید",     "نهنگ",    "گرفت",    "آورد",
    };
    return words;
}

const std::vector<std::string>& function_words() {
    static const std::vector<std::string> words = {"و",  "در",   "به",  "از",   "که",  "این", "را",  "با",
                                                   "است", "برای", "آن",  "یک",   "تا",  "بر",  "هم",  "نیز",
                                                   "اما", "یا",   "اگر", "ولی",  "چون", "پس",  "باید", "شد"};
    return words;
}

std::string random_word(Rng& rng) {
    static constexpr std::array<char32_t, 32> letters = {
        0x0627, 0x0628, 0x067E, 0x062A, 0x062B, 0x062C, 0x0686, 0x062D, 0x062E, 0x062F, 0x0630,
        0x0631, 0x0632, 0x0698, 0x0633, 0x0634, 0x0635, 0x0636, 0x0637, 0x0638, 0x0639, 0x063A,
        0x0641, 0x0642, 0x06A9, 0x06AF, 0x0644, 0x0645, 0x0646, 0x0648, 0x0647, 0x06CC};
    std::uniform_int_distribution<std::size_t> len(3, 8);
    std::uniform_int_distribution<std::size_t> pick(0, letters.size() - 1);
    std::u32string w;
    const std::size_t n = len(rng);
    for (std::size_t i = 0; i < n; ++i) w.push_back(letters[pick(rng)]);
    return utf8::encode(w);
}

std::vector<std::string> vocabulary(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(random_word(rng));
    return out;
}

std::string sentence(Rng& rng, std::size_t n) {
    const auto& cw = content_words();
    const auto& fw = function_words();
    std::uniform_int_distribution<std::size_t> pc(0, cw.size() - 1);
    std::uniform_int_distribution<std::size_t> pf(0, fw.size() - 1);
    std::bernoulli_distribution function_word(0.3);
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out.push_back(' ');
        out += function_word(rng) ? fw[pf(rng)] : cw[pc(rng)];
    }
    return out;
}

std::string paragraph(Rng& rng, std::size_t lines, std::size_t words_per_line) {
    std::string out;
    for (std::size_t i = 0; i < lines; ++i) {
        if (i) out.push_back('\n');
        out += sentence(rng, words_per_line);
    }
    return out;
}

std::u32string random_unicode(Rng& rng, std::size_t max_len) {
    static const std::vector<char32_t> pool = {
        // Persian and Arabic letters, variants that the mapping table folds
        0x0627, 0x0628, 0x067E, 0x06CC, 0x064A, 0x0649, 0x06A9, 0x0643, 0x0647, 0x06C1, 0x0629, 0x0622,
        // i'rab, tatweel, joiners
        0x064B, 0x064E, 0x0650, 0x0651, 0x0652, 0x0640, 0x200C, 0x200D,
        // digits
        0x0030, 0x0035, 0x0661, 0x0664, 0x06F1, 0x06F4, 0xFF15,
        // whitespace
        0x0020, 0x0020, 0x0009, 0x000A, 0x000A, 0x000D, 0x00A0, 0x2003, 0x3000,
        // presentation forms and fullwidth
        0xFEEB, 0xFEF1, 0xFB8E, 0xFF21,
        // blocked
        0xFFFD, 0x200B, 0xFEFF, 0x00AD, 0x202B, 0xE000, 0x0001,
        // latin, symbols, emoji
        0x0061, 0x0062, 0x0041, 0x0021, 0x002E, 0x060C, 0x061F, 0x00AB, 0x1F600, 0x2764};
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::bernoulli_distribution repeat(0.15);
    std::uniform_int_distribution<std::size_t> run(2, 7);
    std::u32string s;
    const std::size_t n = len(rng);
    while (s.size() < n) {
        const char32_t cp = pool[pick(rng)];
        const std::size_t times = repeat(rng) ? run(rng) : 1;
        s.append(times, cp);
    }
    return s;
}

std::vector<Document> web_corpus(std::size_t n, std::uint64_t seed, SourceKind source) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> lines(3, 10);
    std::uniform_int_distribution<std::size_t> width(16, 30);
    std::vector<Document> docs;
    docs.reserve(n);
    char id[16];
    for (std::size_t i = 0; i < n; ++i) {
        std::snprintf(id, sizeof id, "w%06zu", i);
        const double roll = u(rng);
        std::string text;
        if (roll < 0.10 && !docs.empty()) {
            // Near-duplicate of an earlier document with a changed price.
            std::uniform_int_distribution<std::size_t> pick(0, docs.size() - 1);
            text = docs[pick(rng)].original_text() + "\nقیمت " + std::to_string(1000 + i) + " تومان";
        } else if (roll < 0.18) {
            text = sentence(rng, 5 + i % 20);
        } else if (roll < 0.24) {
            text = "This page is written in English and has nothing Persian in it at all, so it should go.\n" +
                   std::string("Another English line follows here with more words to pass the length check.");
        } else if (roll < 0.30) {
            text = "<div class=\"nav\">\n" + paragraph(rng, lines(rng), width(rng)) +
                   "\nfunction track(){ return 1; }\n$$$ ### %%% 123 456 789 !!!\n</div>";
        } else if (roll < 0.34) {
            text = "خانه\nاخبار\nتماس\n" + paragraph(rng, lines(rng), width(rng));
        } else if (roll < 0.37) {
            const std::string w = content_words()[i % content_words().size()];
            for (int k = 0; k < 40; ++k) text += (k ? " " : "") + w;
        } else {
            text = paragraph(rng, lines(rng), width(rng));
            if (u(rng) < 0.2) text += "\nکپی ۱۴۰۲ © تمامی حقوق محفوظ است | ۱۲۳ ۴۵۶ ## $$";
        }
        docs.emplace_back(id, source, std::move(text));
    }
    return docs;
}

}  // namespace refinery::synth
