#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tda {

// Every failure the library raises carries a stable machine-readable code
// (e.g. "empty-set", "complexity-budget", "grid-mismatch") plus a human
// message.  The CLI maps codes to exit codes: budget failures exit 3,
// everything else that throws exits 2.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

    bool is_budget() const noexcept { return code_ == "complexity-budget" || code_ == "transport-too-large"; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, const std::string& code, const std::string& message) {
    if (!condition) fail(code, message);
}

// Shortest representation that round-trips a double exactly (17 significant
// digits).  All numeric text the library writes goes through this so that
// re-runs are byte-identical.
std::string format_double(double value);

// Parse helpers shared by the CSV readers; throw Error("parse", ...) on bad input.
double parse_double(const std::string& text);

// Runs fn(i) for i in [0, count).  jobs <= 1 executes inline; otherwise a
// fixed block decomposition is handed to worker threads.  Results must be
// written to disjoint, preallocated slots — the schedule never influences
// output because every i owns its slot and any RNG stream is derived from i.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

unsigned hardware_jobs();

}  // namespace tda
