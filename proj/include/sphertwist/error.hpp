#pragma once

#include <stdexcept>
#include <string>

namespace sphertwist {

// Failure classes, aligned with the CLI exit-code contract:
//   1 soundness (a theorem-backed check failed at runtime)
//   2 usage / schema
//   3 invariant (d^2 != 0, eps^2 != 0, Maurer-Cartan, ...)
//   4 not-distinct
//   5 precondition
enum class errc {
    soundness = 1,
    usage = 2,
    invariant = 3,
    not_distinct = 4,
    precondition = 5,
};

class error : public std::runtime_error {
public:
    error(errc kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    errc kind() const { return kind_; }

private:
    errc kind_;
};

[[noreturn]] inline void fail(errc kind, const std::string& what) { throw error(kind, what); }

inline void require(bool ok, errc kind, const std::string& what) {
    if (!ok) fail(kind, what);
}

} // namespace sphertwist
