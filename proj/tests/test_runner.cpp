#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "leastprime/runner.hpp"

using namespace leastprime;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir()
    {
        static int counter = 0;
        path = fs::temp_directory_path() / ("leastprime_runner_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunManifest manifest(const fs::path& dir, std::uint64_t from, std::uint64_t to, Strategy s = Strategy::hybrid,
                     unsigned workers = 1, std::uint64_t chunk = 1024)
{
    RunManifest m;
    m.from = from;
    m.to = to;
    m.strategy = s;
    m.workers = workers;
    m.chunk = chunk;
    m.output_path = dir / "out.csv";
    m.checkpoint_path = dir / "out.ckpt";
    return m;
}

RunHooks quiet()
{
    RunHooks h;
    h.log = [](std::string_view) {};
    return h;
}

} // namespace

TEST_CASE("record and header formats")
{
    CHECK(format_record({5, 4, 4, 19}) == "5,4,4,19\n");
    CHECK(parse_record("5,4,4,19") == PminRecord{5, 4, 4, 19});
    CHECK_FALSE(parse_record("5,4,4"));
    CHECK_FALSE(parse_record("5,4,4,19,1"));
    CHECK_FALSE(parse_record("5,4,x,19"));
    CHECK_FALSE(parse_record(""));

    const ResultHeader h{3, 100, Strategy::by_scan};
    CHECK(h.line() == "# leastprime v1 from=3 to=100 strategy=by-scan");
    CHECK(ResultHeader::parse(h.line()) == h);
    CHECK_FALSE(ResultHeader::parse("# leastprime v2 from=3 to=100 strategy=hybrid"));
    CHECK_FALSE(ResultHeader::parse("# leastprime v1 from=3 to=3 strategy=hybrid"));
    CHECK_FALSE(ResultHeader::parse("# leastprime v1 from=3 to=10 strategy=magic"));
}

TEST_CASE("output is identical for any worker count and chunk size")
{
    TempDir dir;
    auto m = manifest(dir.path, 3, 100);
    run_range(m, quiet());
    const auto reference = slurp(m.output_path);
    CHECK(reference.rfind("# leastprime v1 from=3 to=100 strategy=hybrid\n3,2,1,7\n4,2,1,5\n5,4,4,19\n", 0) == 0);

    for (unsigned w : {1u, 2u, 8u})
        for (std::uint64_t chunk : {1ULL, 7ULL, 1024ULL}) {
            auto mm = manifest(dir.path, 3, 100, Strategy::hybrid, w, chunk);
            const auto report = run_range(mm, quiet());
            CHECK(report.completed);
            CHECK(report.records_written == 97);
            CHECK(slurp(mm.output_path) == reference);
        }
    // every strategy writes the same records
    for (auto s : {Strategy::by_class, Strategy::by_scan, Strategy::cross_check}) {
        auto mm = manifest(dir.path, 3, 100, s, 3, 10);
        run_range(mm, quiet());
        const auto text = slurp(mm.output_path);
        CHECK(text.substr(text.find('\n')) == reference.substr(reference.find('\n')));
    }
}

TEST_CASE("round trip and certificate check on load")
{
    TempDir dir;
    auto m = manifest(dir.path, 3, 500, Strategy::cross_check, 2, 64);
    run_range(m, quiet());
    const auto table = build_prime_table(default_prime_limit(500));
    const auto file = load_result_file(m.output_path, &table);
    CHECK(file.complete());
    CHECK(file.header == m.header());
    REQUIRE(file.records.size() == 497);
    CHECK(file.records[2] == PminRecord{5, 4, 4, 19});

    const auto copy = dir.path / "copy.csv";
    write_result_file(copy, file);
    CHECK(slurp(copy) == slurp(m.output_path));
    CHECK(load_result_file(copy).records == file.records);

    // a forged record fails the certificate check
    auto forged = file;
    forged.records[2].p = 29;
    write_result_file(copy, forged);
    CHECK_NOTHROW(load_result_file(copy));
    CHECK_THROWS_AS(load_result_file(copy, &table), IntegrityFailure);

    // gaps and torn lines are structural errors
    auto gap = file;
    gap.records.erase(gap.records.begin() + 10);
    write_result_file(copy, gap);
    CHECK_THROWS_AS(load_result_file(copy), IntegrityFailure);
    {
        std::ofstream out(copy, std::ios::binary | std::ios::trunc);
        out << m.header().line() << "\n3,2,1,7\n4,2,1";
    }
    CHECK_THROWS_AS(load_result_file(copy), IntegrityFailure);
}

TEST_CASE("interrupted run resumes to an identical file")
{
    TempDir dir;
    auto clean = manifest(dir.path, 3, 3000, Strategy::hybrid, 4, 100);
    clean.output_path = dir.path / "clean.csv";
    clean.checkpoint_path = dir.path / "clean.ckpt";
    run_range(clean, quiet());
    const auto reference = slurp(clean.output_path);

    for (std::uint64_t stop_after : {0ULL, 1ULL, 5ULL, 29ULL}) {
        auto m = manifest(dir.path, 3, 3000, Strategy::hybrid, 4, 100);
        auto hooks = quiet();
        hooks.after_chunk = [&](std::uint64_t written, std::uint64_t) { return written < stop_after; };
        const auto first = run_range(m, hooks);
        if (stop_after > 0) {
            CHECK(first.interrupted);
            CHECK_FALSE(first.completed);
            CHECK(read_checkpoint(m.checkpoint_path).last_n == first.last_n);
        }
        const auto second = resume(m, quiet());
        CHECK(second.completed);
        CHECK(second.repaired_bytes == 0);
        CHECK(slurp(m.output_path) == reference);
    }
}

TEST_CASE("resume repairs a torn tail")
{
    TempDir dir;
    auto m = manifest(dir.path, 3, 2000, Strategy::hybrid, 2, 128);
    run_range(m, quiet());
    const auto reference = slurp(m.output_path);

    auto hooks = quiet();
    hooks.after_chunk = [](std::uint64_t written, std::uint64_t) { return written < 3; };
    const auto partial = run_range(m, hooks);
    REQUIRE(partial.interrupted);

    SUBCASE("partial last line")
    {
        // a complete record past the checkpoint, then half a line
        const auto next = partial.last_n + 1;
        const auto full = reference.substr(reference.find("\n" + std::to_string(next) + ",") + 1);
        const auto line_end = full.find('\n');
        std::ofstream out(m.output_path, std::ios::binary | std::ios::app);
        out << full.substr(0, line_end + 1) << full.substr(line_end + 1, 5);
    }
    SUBCASE("garbage line")
    {
        std::ofstream out(m.output_path, std::ios::binary | std::ios::app);
        out << "this is not a record\n";
    }
    SUBCASE("wrong record")
    {
        std::ofstream out(m.output_path, std::ios::binary | std::ios::app);
        out << partial.last_n + 1 << ",1,1,2\n";
    }

    std::string logged;
    auto rh = quiet();
    rh.log = [&](std::string_view s) { logged += s; };
    const auto report = resume(m, rh);
    CHECK(report.completed);
    CHECK(report.repaired_bytes > 0);
    CHECK(logged.find("dropping") != std::string::npos);
    CHECK(slurp(m.output_path) == reference);
}

TEST_CASE("resume refusals")
{
    TempDir dir;
    auto m = manifest(dir.path, 3, 500, Strategy::hybrid, 1, 50);
    auto hooks = quiet();
    hooks.after_chunk = [](std::uint64_t written, std::uint64_t) { return written < 2; };
    run_range(m, hooks);

    SUBCASE("strategy mismatch")
    {
        auto other = m;
        other.strategy = Strategy::by_scan;
        try {
            resume(other, quiet());
            FAIL("expected refusal");
        } catch (const IntegrityFailure& e) {
            CHECK(std::string(e.what()).find("strategy: file=hybrid manifest=by-scan") != std::string::npos);
        }
    }
    SUBCASE("range mismatch")
    {
        auto other = m;
        other.to = 600;
        CHECK_THROWS_AS(resume(other, quiet()), IntegrityFailure);
    }
    SUBCASE("corrupted checkpointed prefix")
    {
        std::fstream f(m.output_path, std::ios::binary | std::ios::in | std::ios::out);
        f.seekp(60);
        f.put('9');
        f.close();
        CHECK_THROWS_AS(resume(m, quiet()), IntegrityFailure);
    }
    SUBCASE("missing checkpoint")
    {
        fs::remove(m.checkpoint_path);
        CHECK_THROWS_AS(resume(m, quiet()), IoError);
    }
    SUBCASE("completed run is a no-op")
    {
        const auto r1 = resume(m, quiet());
        CHECK(r1.completed);
        const auto before = slurp(m.output_path);
        const auto r2 = resume(m, quiet());
        CHECK(r2.completed);
        CHECK(r2.records_written == 0);
        CHECK(slurp(m.output_path) == before);
    }
}

TEST_CASE("checkpoint format")
{
    TempDir dir;
    const auto p = dir.path / "c.ckpt";
    write_checkpoint(p, {1234, 56789, 0xdeadbeefULL});
    CHECK(slurp(p) == "1234 56789 00000000deadbeef\n");
    CHECK(read_checkpoint(p) == Checkpoint{1234, 56789, 0xdeadbeefULL});
    std::ofstream(p) << "garbage\n";
    CHECK_THROWS_AS(read_checkpoint(p), IntegrityFailure);
}

TEST_CASE("an undersized prime table is extended once")
{
    TempDir dir;
    auto m = manifest(dir.path, 3, 300, Strategy::hybrid, 2, 16);
    run_range(m, quiet());
    const auto reference = slurp(m.output_path);

    m.prime_limit = 300;
    std::string logged;
    auto hooks = quiet();
    hooks.log = [&](std::string_view s) { logged += s; };
    const auto report = run_range(m, hooks);
    CHECK(report.table_extensions >= 1);
    CHECK(logged.find("rebuilding") != std::string::npos);
    CHECK(slurp(m.output_path) == reference);
}

TEST_CASE("manifest validation")
{
    TempDir dir;
    auto m = manifest(dir.path, 3, 100);
    CHECK_NOTHROW(m.validate());
    auto bad = m;
    bad.from = 2;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = m;
    bad.to = 3;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = m;
    bad.workers = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = m;
    bad.prime_limit = 50;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = m;
    bad.output_path.clear();
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    CHECK(m.effective_prime_limit() == default_prime_limit(100));
}

TEST_CASE("unwritable output surfaces the path")
{
    auto m = manifest("/nonexistent/dir", 3, 10);
    try {
        run_range(m, quiet());
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(e.path().find("/nonexistent/dir") == 0);
    }
}
