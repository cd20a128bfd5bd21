#include "refinery/corpus_io.hpp"

#include <json.hpp>

#include "refinery/error.hpp"
#include "refinery/text.hpp"
#include "refinery/utf8.hpp"

namespace refinery {

namespace {

using ojson = nlohmann::ordered_json;

constexpr std::size_t kMaxNotes = 20;

std::string string_field(const ojson& rec, const char* key, bool required) {
    auto it = rec.find(key);
    if (it == rec.end()) {
        if (required) throw FormatError(std::string("missing field '") + key + "'", 0);
        return {};
    }
    if (!it->is_string()) throw FormatError(std::string("field '") + key + "' is not a string", 0);
    return it->get<std::string>();
}

}  // namespace

Document parse_record(std::string_view line, SourceKind default_source) {
    ojson rec;
    try {
        rec = ojson::parse(line);
    } catch (const ojson::parse_error& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what(), 0);
    }
    if (!rec.is_object()) throw FormatError("record is not an object", 0);

    std::string id = string_field(rec, "id", true);
    if (id.empty()) throw FormatError("empty id", 0);
    std::string body = string_field(rec, "text", true);

    SourceKind source = default_source;
    if (rec.contains("source")) {
        const std::string name = string_field(rec, "source", true);
        auto parsed = parse_source(name);
        if (!parsed) throw FormatError("unknown source '" + name + "'", 0);
        source = *parsed;
    }

    std::map<std::string, std::string> meta;
    if (auto it = rec.find("meta"); it != rec.end() && !it->is_null()) {
        if (!it->is_object()) throw FormatError("field 'meta' is not an object", 0);
        for (const auto& [k, v] : it->items()) {
            if (!v.is_string()) throw FormatError("meta value '" + k + "' is not a string", 0);
            meta.emplace(k, v.get<std::string>());
        }
    }
    // The parser already rejects ill-formed UTF-8 inside strings; this keeps the
    // guarantee independent of the JSON library.
    if (!utf8::valid(id) || !utf8::valid(body)) throw FormatError("invalid UTF-8", 0);
    return Document(std::move(id), source, std::move(body), std::move(meta));
}

std::string format_record(const Document& doc) {
    ojson rec;
    rec["id"] = doc.id;
    rec["source"] = std::string(to_string(doc.source));
    rec["text"] = doc.text;
    ojson meta = ojson::object();
    for (const auto& [k, v] : doc.metadata) meta[k] = v;
    rec["meta"] = std::move(meta);
    return rec.dump(-1, ' ', false, ojson::error_handler_t::strict);
}

CorpusReader::CorpusReader(const std::filesystem::path& path, ReadOptions options)
    : in_(path, std::ios::binary), options_(options) {
    if (!in_) throw IoError("cannot open corpus file " + path.string());
}

void CorpusReader::skip(std::size_t line_no, const std::string& why) {
    if (options_.strict) throw FormatError(why, line_no);
    ++stats_.skipped;
    if (stats_.notes.size() < kMaxNotes) stats_.notes.push_back("line " + std::to_string(line_no) + ": " + why);
}

std::optional<Document> CorpusReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(std::string_view(line)).empty()) continue;
        try {
            Document doc = parse_record(line, options_.source);
            if (!seen_ids_.insert(doc.id).second) {
                skip(line_no_, "duplicate id '" + doc.id + "'");
                continue;
            }
            ++stats_.records;
            return doc;
        } catch (const FormatError& e) {
            skip(line_no_, e.what());
        }
    }
    if (in_.bad()) throw IoError("read error after line " + std::to_string(line_no_));
    return std::nullopt;
}

std::vector<Document> read_corpus(const std::filesystem::path& path, ReadOptions options, ReadStats* stats) {
    CorpusReader reader(path, options);
    std::vector<Document> docs;
    while (auto doc = reader.next()) docs.push_back(std::move(*doc));
    if (stats != nullptr) *stats = reader.stats();
    return docs;
}

CorpusWriter::CorpusWriter(const std::filesystem::path& path) : path_(path) {
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) fail("cannot open " + path.string() + " for writing");
}

void CorpusWriter::fail(const std::string& what) {
    std::ofstream marker(path_.string() + ".partial", std::ios::trunc);
    if (marker) marker << "incomplete output: " << count_ << " records written before failure\n";
    throw IoError(what);
}

void CorpusWriter::write(const Document& doc) {
    out_ << format_record(doc) << '\n';
    if (!out_) fail("write failed on " + path_.string() + " after " + std::to_string(count_) + " records");
    ++count_;
}

std::size_t CorpusWriter::close() {
    out_.flush();
    if (!out_) fail("flush failed on " + path_.string());
    out_.close();
    return count_;
}

std::size_t write_corpus(std::span<const Document> docs, const std::filesystem::path& path) {
    CorpusWriter writer(path);
    for (const Document& d : docs) writer.write(d);
    return writer.close();
}

}  // namespace refinery
