#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace leastprime {

// Process exit codes used by the CLI.
enum class ExitCode : int {
    ok = 0,
    invalid_arguments = 1,
    integrity_failure = 2,
    resource_limit = 3,
};

// Root of the library's error hierarchy. Every error knows the exit code the
// CLI should report for it.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual ExitCode exit_code() const noexcept = 0;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::invalid_arguments; }
};

// gcd(a, n) != 1 for a requested residue class.
class InvalidResidue : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class OutOfRange : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::invalid_arguments; }
};

// A search walked past the end of the prime table. `needed` is the first
// integer that could not be tested.
class TableExhausted : public OutOfRange {
public:
    TableExhausted(const std::string& what, std::uint64_t needed)
        : OutOfRange(what), needed_(needed) {}
    std::uint64_t needed() const noexcept { return needed_; }

private:
    std::uint64_t needed_;
};

class ResourceLimit : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::resource_limit; }
};

class IntegrityFailure : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::integrity_failure; }
};

class IoError : public Error {
public:
    IoError(const std::string& what, std::string path)
        : Error(what + ": " + path), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }
    ExitCode exit_code() const noexcept override { return ExitCode::integrity_failure; }

private:
    std::string path_;
};

// Quadrature did not reach its tolerance.
class NumericalFailure : public Error {
public:
    NumericalFailure(const std::string& what, double achieved_error)
        : Error(what), achieved_error_(achieved_error) {}
    double achieved_error() const noexcept { return achieved_error_; }
    ExitCode exit_code() const noexcept override { return ExitCode::integrity_failure; }

private:
    double achieved_error_;
};

// Memory check shared by the table builders.
void check_memory_budget(const char* what, std::uint64_t bytes, std::uint64_t budget);

// Default budget for any single table: 8 GiB.
inline constexpr std::uint64_t kDefaultMemoryBudget = std::uint64_t{8} << 30;

} // namespace leastprime
