#include "leastprime/errors.hpp"

#include <fmt/format.h>

namespace leastprime {

void check_memory_budget(const char* what, std::uint64_t bytes, std::uint64_t budget)
{
    if (bytes > budget) {
        throw ResourceLimit(fmt::format("{} needs {} bytes, exceeding the memory budget of {} bytes",
                                        what, bytes, budget));
    }
}

} // namespace leastprime
