#pragma once

// Result files and checkpoints.
//
//   # leastprime v1 from=<x> to=<y> strategy=<s>
//   n,phi,a,p
//   ...
//
// One record per modulus, ascending n, no gaps, no blank lines. The checkpoint
// is one line "<last_completed_n> <result_bytes> <fnv1a64 hex>", where the
// hash covers the first <result_bytes> bytes of the result file.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leastprime/pmin.hpp"

namespace leastprime {

struct ResultHeader {
    std::uint64_t from = 3;
    std::uint64_t to = 3;
    Strategy strategy = Strategy::hybrid;

    std::string line() const; // without the trailing newline
    static std::optional<ResultHeader> parse(std::string_view line);
    bool operator==(const ResultHeader&) const = default;
};

struct ResultFile {
    ResultHeader header;
    std::vector<PminRecord> records;

    bool complete() const noexcept { return records.size() == header.to - header.from; }
};

std::string format_record(const PminRecord& rec); // "n,phi,a,p\n"
std::optional<PminRecord> parse_record(std::string_view line);

void write_result_file(const std::filesystem::path& path, const ResultFile& file);

// Reads and structurally validates a result file (header, ascending n without
// gaps from header.from). With a table, also runs the certificate check on
// every record. A file may be a prefix of its range; see complete().
ResultFile load_result_file(const std::filesystem::path& path, const PrimeTable* certify = nullptr);

// Streams the records of a result file through f without holding them all.
// Same structural validation as load_result_file. Returns the header and the
// number of records.
template <class F>
std::pair<ResultHeader, std::uint64_t> for_each_record(const std::filesystem::path& path, F&& f);

// 64-bit FNV-1a, incremental.
class Fnv1a {
public:
    void update(std::string_view bytes) noexcept
    {
        for (unsigned char c : bytes) {
            state_ ^= c;
            state_ *= 0x100000001b3ULL;
        }
    }
    std::uint64_t value() const noexcept { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

struct Checkpoint {
    std::uint64_t last_n = 0;
    std::uint64_t bytes = 0;
    std::uint64_t checksum = 0;
    bool operator==(const Checkpoint&) const = default;
};

// Written to a temporary file and renamed into place.
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& cp);
Checkpoint read_checkpoint(const std::filesystem::path& path);

namespace detail {
[[noreturn]] void bad_result_line(const std::filesystem::path& path, std::uint64_t line_no, std::string_view why);
}

template <class F>
std::pair<ResultHeader, std::uint64_t> for_each_record(const std::filesystem::path& path, F&& f)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open result file", path.string());
    std::string line;
    if (!std::getline(in, line)) detail::bad_result_line(path, 1, "missing header");
    const auto header = ResultHeader::parse(line);
    if (!header) detail::bad_result_line(path, 1, "malformed header");

    std::uint64_t expected = header->from;
    std::uint64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (in.eof()) detail::bad_result_line(path, line_no, "unterminated last line");
        const auto rec = parse_record(line);
        if (!rec) detail::bad_result_line(path, line_no, "malformed record");
        if (rec->n != expected) detail::bad_result_line(path, line_no, "modulus out of sequence");
        if (rec->n >= header->to) detail::bad_result_line(path, line_no, "modulus beyond header range");
        f(*rec);
        ++expected;
    }
    return {*header, expected - header->from};
}

} // namespace leastprime
