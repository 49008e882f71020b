#include "leastprime/result_io.hpp"

#include <charconv>
#include <cstdio>

#include <fmt/format.h>

namespace leastprime {

namespace {

bool parse_u64(std::string_view s, std::uint64_t& out)
{
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

// Value of "key=value" token; empty view if the key does not match.
std::optional<std::string_view> field(std::string_view token, std::string_view key)
{
    if (token.size() <= key.size() + 1 || token.substr(0, key.size()) != key || token[key.size()] != '=')
        return std::nullopt;
    return token.substr(key.size() + 1);
}

} // namespace

std::string ResultHeader::line() const
{
    return fmt::format("# leastprime v1 from={} to={} strategy={}", from, to, to_string(strategy));
}

std::optional<ResultHeader> ResultHeader::parse(std::string_view line)
{
    constexpr std::string_view prefix = "# leastprime v1 ";
    if (line.substr(0, prefix.size()) != prefix) return std::nullopt;
    line.remove_prefix(prefix.size());

    std::vector<std::string_view> tokens;
    while (!line.empty()) {
        const auto sp = line.find(' ');
        tokens.push_back(line.substr(0, sp));
        if (sp == std::string_view::npos) break;
        line.remove_prefix(sp + 1);
    }
    if (tokens.size() != 3) return std::nullopt;

    ResultHeader h;
    const auto from = field(tokens[0], "from");
    const auto to = field(tokens[1], "to");
    const auto strategy = field(tokens[2], "strategy");
    if (!from || !to || !strategy || !parse_u64(*from, h.from) || !parse_u64(*to, h.to)) return std::nullopt;
    try {
        h.strategy = parse_strategy(*strategy);
    } catch (const InvalidArgument&) {
        return std::nullopt;
    }
    if (h.from < 3 || h.to <= h.from) return std::nullopt;
    return h;
}

std::string format_record(const PminRecord& rec)
{
    return fmt::format("{},{},{},{}\n", rec.n, rec.phi, rec.a, rec.p);
}

std::optional<PminRecord> parse_record(std::string_view line)
{
    std::uint64_t v[4];
    for (int i = 0; i < 4; ++i) {
        const auto comma = line.find(',');
        if ((comma == std::string_view::npos) != (i == 3)) return std::nullopt;
        if (!parse_u64(line.substr(0, comma), v[i])) return std::nullopt;
        if (i < 3) line.remove_prefix(comma + 1);
    }
    return PminRecord{v[0], v[1], v[2], v[3]};
}

void write_result_file(const std::filesystem::path& path, const ResultFile& file)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open result file for writing", path.string());
    out << file.header.line() << '\n';
    for (const auto& r : file.records) out << format_record(r);
    if (!out) throw IoError("failed writing result file", path.string());
}

ResultFile load_result_file(const std::filesystem::path& path, const PrimeTable* certify)
{
    ResultFile file;
    auto [header, count] = for_each_record(path, [&](const PminRecord& r) {
        if (certify) verify_certificate(r, *certify);
        file.records.push_back(r);
    });
    file.header = header;
    return file;
}

void detail::bad_result_line(const std::filesystem::path& path, std::uint64_t line_no, std::string_view why)
{
    throw IntegrityFailure(fmt::format("{}:{}: {}", path.string(), line_no, why));
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& cp)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open checkpoint for writing", tmp.string());
        out << fmt::format("{} {} {:016x}\n", cp.last_n, cp.bytes, cp.checksum);
        out.flush();
        if (!out) throw IoError("failed writing checkpoint", tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move checkpoint into place (" + ec.message() + ")", path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint", path.string());
    std::string line;
    std::getline(in, line);
    std::string_view s = line;
    Checkpoint cp;
    const auto sp1 = s.find(' ');
    const auto sp2 = sp1 == std::string_view::npos ? sp1 : s.find(' ', sp1 + 1);
    bool ok = sp2 != std::string_view::npos && parse_u64(s.substr(0, sp1), cp.last_n) &&
              parse_u64(s.substr(sp1 + 1, sp2 - sp1 - 1), cp.bytes);
    if (ok) {
        const auto hex = s.substr(sp2 + 1);
        const auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), cp.checksum, 16);
        ok = !hex.empty() && ec == std::errc{} && ptr == hex.data() + hex.size();
    }
    if (!ok) throw IntegrityFailure(fmt::format("{}: malformed checkpoint", path.string()));
    return cp;
}

} // namespace leastprime
