#pragma once

// Line-delimited JSON corpus files: one {"id","source","text","meta"} object per line, UTF-8.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "refinery/document.hpp"

namespace refinery {

struct ReadOptions {
    // Used for records that carry no "source" field.
    SourceKind source = SourceKind::Web;
    // Strict mode turns malformed records and duplicate ids into a FormatError.
    bool strict = false;
};

struct ReadStats {
    std::size_t records = 0;
    std::size_t skipped = 0;
    // First few skip messages, for diagnostics.
    std::vector<std::string> notes;
};

/// Parses one record. Throws FormatError (line 0) when the record is malformed.
Document parse_record(std::string_view line, SourceKind default_source);
std::string format_record(const Document& doc);

class CorpusReader {
public:
    CorpusReader(const std::filesystem::path& path, ReadOptions options);

    /// Next valid document in file order, or nullopt at end of file.
    std::optional<Document> next();

    const ReadStats& stats() const noexcept { return stats_; }

private:
    void skip(std::size_t line_no, const std::string& why);

    std::ifstream in_;
    ReadOptions options_;
    ReadStats stats_;
    std::size_t line_no_ = 0;
    std::unordered_set<std::string> seen_ids_;
};

std::vector<Document> read_corpus(const std::filesystem::path& path, ReadOptions options = {},
                                  ReadStats* stats = nullptr);

class CorpusWriter {
public:
    explicit CorpusWriter(const std::filesystem::path& path);
    CorpusWriter(const CorpusWriter&) = delete;
    CorpusWriter& operator=(const CorpusWriter&) = delete;

    void write(const Document& doc);
    /// Flushes and closes; returns the record count.
    std::size_t close();
    std::size_t count() const noexcept { return count_; }

private:
    [[noreturn]] void fail(const std::string& what);

    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t count_ = 0;
};

/// Writes every document; on an I/O failure leaves `<path>.partial` behind and throws IoError.
std::size_t write_corpus(std::span<const Document> docs, const std::filesystem::path& path);

}  // namespace refinery
