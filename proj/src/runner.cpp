#include "leastprime/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <exception>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include <fmt/format.h>

namespace leastprime {

namespace {

using Clock = std::chrono::steady_clock;

void default_log(std::string_view msg) { std::cerr << "[leastprime] " << msg << '\n'; }

// The prime table shared by all workers. Replaced (never mutated) when a
// search runs past its end.
class SharedTable {
public:
    SharedTable(std::uint64_t limit, SieveConfig config, std::function<void(std::string_view)> log)
        : config_(config), log_(std::move(log))
    {
        current_ = std::make_shared<const PrimeTable>(build_prime_table(limit, config_));
    }

    std::shared_ptr<const PrimeTable> get() const
    {
        std::lock_guard lock(mu_);
        return current_;
    }

    std::shared_ptr<const PrimeTable> extend(const std::shared_ptr<const PrimeTable>& seen, std::uint64_t needed)
    {
        std::lock_guard lock(mu_);
        if (current_ != seen && current_->limit() >= needed) return current_;
        const std::uint64_t limit = 2 * std::max(needed, current_->limit());
        log_(fmt::format("prime table exhausted (needed {}), rebuilding with limit {}", needed, limit));
        current_ = std::make_shared<const PrimeTable>(build_prime_table(limit, config_));
        ++extensions_;
        return current_;
    }

    unsigned extensions() const
    {
        std::lock_guard lock(mu_);
        return extensions_;
    }

private:
    SieveConfig config_;
    std::function<void(std::string_view)> log_;
    mutable std::mutex mu_;
    std::shared_ptr<const PrimeTable> current_;
    unsigned extensions_ = 0;
};

PminRecord compute_one(std::uint64_t n, Strategy strategy, SharedTable& tables)
{
    auto t = tables.get();
    try {
        return compute_pmin(n, *t, strategy);
    } catch (const TableExhausted& e) {
        t = tables.extend(t, e.needed());
    }
    try {
        return compute_pmin(n, *t, strategy);
    } catch (const TableExhausted& e) {
        throw ResourceLimit(fmt::format("P({}) still exhausts the extended prime table: {}", n, e.what()));
    }
}

// Append-only output with a running byte count and hash.
struct Sink {
    std::filesystem::path path;
    std::ofstream out;
    std::uint64_t bytes = 0;
    Fnv1a hash;

    void write(std::string_view s)
    {
        out.write(s.data(), static_cast<std::streamsize>(s.size()));
        out.flush();
        if (!out) throw IoError("failed writing result file", path.string());
        bytes += s.size();
        hash.update(s);
    }
};

void execute(const RunManifest& m, std::uint64_t start, Sink& sink, SharedTable& tables, const RunHooks& hooks,
             RunReport& report)
{
    const auto& log = hooks.log;
    report.first_n = start;
    report.last_n = start - 1;
    if (start >= m.to) {
        report.completed = true;
        return;
    }

    const std::uint64_t chunks = (m.to - start + m.chunk - 1) / m.chunk;
    const std::uint64_t window = 4 * static_cast<std::uint64_t>(m.workers);

    std::mutex mu;
    std::condition_variable cv;
    std::map<std::uint64_t, std::string> done;
    std::uint64_t claimed = 0;
    std::uint64_t written = 0;
    bool stop = false;
    std::exception_ptr failure;

    auto worker = [&] {
        for (;;) {
            std::uint64_t idx;
            {
                std::unique_lock lock(mu);
                cv.wait(lock, [&] { return stop || claimed < written + window; });
                if (stop || claimed >= chunks) return;
                idx = claimed++;
            }
            std::string text;
            try {
                const std::uint64_t lo = start + idx * m.chunk;
                const std::uint64_t hi = std::min(m.to, lo + m.chunk);
                for (std::uint64_t n = lo; n < hi; ++n) {
                    text += format_record(compute_one(n, m.strategy, tables));
                    if (stop) return;
                }
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                stop = true;
                cv.notify_all();
                return;
            }
            std::lock_guard lock(mu);
            done.emplace(idx, std::move(text));
            cv.notify_all();
        }
    };

    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < m.workers; ++i) pool.emplace_back(worker);

    auto last_progress = Clock::now();
    try {
        while (written < chunks) {
            std::string text;
            {
                std::unique_lock lock(mu);
                cv.wait(lock, [&] { return failure || done.count(written) > 0; });
                if (failure) break;
                auto node = done.extract(written);
                text = std::move(node.mapped());
            }
            const std::uint64_t last_n = std::min(m.to, start + (written + 1) * m.chunk) - 1;
            sink.write(text);
            write_checkpoint(m.checkpoint_path, {last_n, sink.bytes, sink.hash.value()});
            report.records_written += last_n - report.last_n;
            report.last_n = last_n;
            bool keep_going = true;
            {
                std::lock_guard lock(mu);
                ++written;
                cv.notify_all();
            }
            if (hooks.after_chunk) keep_going = hooks.after_chunk(written, last_n);
            if (!keep_going) {
                report.interrupted = true;
                break;
            }
            if (log && std::chrono::duration<double>(Clock::now() - last_progress).count() >= hooks.progress_interval) {
                last_progress = Clock::now();
                log(fmt::format("progress: n={} ({}/{} chunks)", last_n, written, chunks));
            }
        }
    } catch (...) {
        std::lock_guard lock(mu);
        stop = true;
        cv.notify_all();
        if (!failure) failure = std::current_exception();
    }
    {
        std::lock_guard lock(mu);
        stop = true;
        cv.notify_all();
    }
    pool.clear();
    report.table_extensions = tables.extensions();
    if (failure) std::rethrow_exception(failure);
    report.completed = !report.interrupted && report.last_n + 1 == m.to;
}

RunHooks with_default_log(const RunHooks& hooks)
{
    RunHooks h = hooks;
    if (!h.log) h.log = default_log;
    return h;
}

std::uint64_t size_on_disk(const std::filesystem::path& path)
{
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    if (ec) throw IoError("cannot stat (" + ec.message() + ")", path.string());
    return size;
}

} // namespace

void RunManifest::validate() const
{
    if (from < 3) throw InvalidArgument(fmt::format("--from must be >= 3, got {}", from));
    if (to <= from) throw InvalidArgument(fmt::format("--to ({}) must exceed --from ({})", to, from));
    if (workers < 1) throw InvalidArgument("--workers must be >= 1");
    if (chunk < 1) throw InvalidArgument("chunk size must be >= 1");
    if (prime_limit != 0 && prime_limit < to)
        throw InvalidArgument(fmt::format("--prime-limit ({}) must be >= --to ({})", prime_limit, to));
    if (output_path.empty()) throw InvalidArgument("an output path is required");
    if (checkpoint_path.empty()) throw InvalidArgument("a checkpoint path is required");
}

std::uint64_t RunManifest::effective_prime_limit() const
{
    return prime_limit != 0 ? prime_limit : std::max(default_prime_limit(to), to);
}

RunReport run_range(const RunManifest& manifest, const RunHooks& in_hooks)
{
    manifest.validate();
    const auto hooks = with_default_log(in_hooks);
    SharedTable tables(manifest.effective_prime_limit(), manifest.sieve, hooks.log);

    Sink sink{manifest.output_path, std::ofstream(manifest.output_path, std::ios::binary | std::ios::trunc), 0, {}};
    if (!sink.out) throw IoError("cannot open result file for writing", manifest.output_path.string());
    sink.write(manifest.header().line() + "\n");
    write_checkpoint(manifest.checkpoint_path, {manifest.from - 1, sink.bytes, sink.hash.value()});

    RunReport report;
    execute(manifest, manifest.from, sink, tables, hooks, report);
    return report;
}

RunReport resume(const RunManifest& manifest, const RunHooks& in_hooks)
{
    manifest.validate();
    const auto hooks = with_default_log(in_hooks);
    const auto& path = manifest.output_path;

    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open result file to resume", path.string());
    std::string first_line;
    std::getline(in, first_line);
    const auto header = ResultHeader::parse(first_line);
    if (in.eof() || !header) throw IntegrityFailure(fmt::format("{}: missing or malformed header", path.string()));
    const std::uint64_t header_bytes = first_line.size() + 1;
    const auto expected = manifest.header();
    if (!(*header == expected)) {
        std::string diff;
        if (header->from != expected.from) diff += fmt::format(" from: file={} manifest={};", header->from, expected.from);
        if (header->to != expected.to) diff += fmt::format(" to: file={} manifest={};", header->to, expected.to);
        if (header->strategy != expected.strategy)
            diff += fmt::format(" strategy: file={} manifest={};", to_string(header->strategy),
                                to_string(expected.strategy));
        throw IntegrityFailure(fmt::format("refusing to resume {}, manifest differs:{}", path.string(), diff));
    }

    const Checkpoint cp = read_checkpoint(manifest.checkpoint_path);
    const std::uint64_t size = size_on_disk(path);
    if (cp.bytes > size || cp.bytes < header_bytes)
        throw IntegrityFailure(
            fmt::format("checkpoint covers {} bytes but {} holds {}", cp.bytes, path.string(), size));

    // Hash the checkpointed prefix, remembering its last line.
    Fnv1a prefix;
    std::string last_line;
    {
        in.clear();
        in.seekg(0);
        std::vector<char> buf(std::size_t{1} << 20);
        std::uint64_t left = cp.bytes;
        std::string carry;
        while (left > 0) {
            const auto want = static_cast<std::streamsize>(std::min<std::uint64_t>(left, buf.size()));
            in.read(buf.data(), want);
            if (in.gcount() != want) throw IoError("short read while verifying", path.string());
            const std::string_view block(buf.data(), static_cast<std::size_t>(want));
            prefix.update(block);
            carry += block;
            if (carry.size() > 4096) carry.erase(0, carry.size() - 4096);
            left -= static_cast<std::uint64_t>(want);
        }
        carry.pop_back(); // the prefix always ends in '\n'
        const auto nl = carry.rfind('\n');
        last_line = nl == std::string::npos ? carry : carry.substr(nl + 1);
    }
    if (prefix.value() != cp.checksum)
        throw IntegrityFailure(fmt::format("{}: checksum of the checkpointed prefix does not match", path.string()));
    if (cp.last_n + 1 < manifest.from || cp.last_n >= manifest.to)
        throw IntegrityFailure(fmt::format("checkpoint n={} outside [{}, {})", cp.last_n, manifest.from, manifest.to));

    SharedTable tables(manifest.effective_prime_limit(), manifest.sieve, hooks.log);
    auto certified = [&](const PminRecord& r) {
        auto t = tables.get();
        if (r.p > t->limit()) t = tables.extend(t, r.p);
        return certificate_holds(r, *t);
    };

    // The last checkpointed record must still check out.
    if (cp.last_n >= manifest.from) {
        const auto rec = parse_record(last_line);
        if (!rec || rec->n != cp.last_n || !certified(*rec))
            throw IntegrityFailure(fmt::format("{}: last checkpointed record is invalid", path.string()));
    }

    // Records written after the checkpoint: keep the valid prefix, drop the rest.
    std::string tail(static_cast<std::size_t>(size - cp.bytes), '\0');
    in.read(tail.data(), static_cast<std::streamsize>(tail.size()));
    if (static_cast<std::size_t>(in.gcount()) != tail.size()) throw IoError("short read of tail", path.string());
    in.close();

    std::uint64_t next_n = cp.last_n + 1;
    std::size_t keep = 0;
    while (keep < tail.size() && next_n < manifest.to) {
        const auto nl = tail.find('\n', keep);
        if (nl == std::string::npos) break;
        const auto rec = parse_record(std::string_view(tail).substr(keep, nl - keep));
        if (!rec || rec->n != next_n || !certified(*rec)) break;
        keep = nl + 1;
        ++next_n;
    }

    RunReport report;
    const std::uint64_t kept_bytes = cp.bytes + keep;
    if (keep < tail.size()) {
        report.repaired_bytes = tail.size() - keep;
        hooks.log(fmt::format("{}: dropping {} invalid trailing bytes after n={}", path.string(),
                              report.repaired_bytes, next_n - 1));
        std::filesystem::resize_file(path, kept_bytes);
    }

    Sink sink{path, std::ofstream(path, std::ios::binary | std::ios::app), 0, {}};
    if (!sink.out) throw IoError("cannot open result file for appending", path.string());
    sink.bytes = kept_bytes;
    sink.hash = prefix;
    sink.hash.update(std::string_view(tail).substr(0, keep));
    if (keep != 0) write_checkpoint(manifest.checkpoint_path, {next_n - 1, sink.bytes, sink.hash.value()});

    execute(manifest, next_n, sink, tables, hooks, report);
    if (size_on_disk(path) != sink.bytes)
        throw IntegrityFailure(fmt::format("{}: size disagrees with bytes written", path.string()));
    return report;
}

} // namespace leastprime
