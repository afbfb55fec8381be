#pragma once

// Shared plumbing for the acceptance binary.  Each criterion is a free
// function returning true on pass; the driver prints exactly one
// "<name> PASS" / "<name> FAIL" line per criterion and exits nonzero if
// any requested criterion failed.

#include <cmath>
#include <iostream>
#include <sstream>
#include <string>

namespace acceptance {

bool criterion_a1();
bool criterion_a2();
bool criterion_a3();
bool criterion_a4();
bool criterion_a5();
bool criterion_a6();
bool criterion_a7();
bool criterion_a8();

// One indented evidence line under the verdict, e.g. "  max residual 3.2e-13".
inline void note(const std::string& text) { std::cout << "  " << text << "\n"; }

template <typename T>
std::string str(const T& v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// Tracks the AND of a sequence of named checks, printing each one.
class Checklist {
public:
    bool check(const std::string& what, bool ok) {
        note(std::string(ok ? "ok  " : "BAD ") + what);
        all_ok_ = all_ok_ && ok;
        return ok;
    }

    bool check_le(const std::string& what, double value, double limit) {
        std::ostringstream os;
        os << what << ": " << value << " (limit " << limit << ")";
        return check(os.str(), value <= limit);
    }

    bool check_ge(const std::string& what, double value, double limit) {
        std::ostringstream os;
        os << what << ": " << value << " (floor " << limit << ")";
        return check(os.str(), value >= limit);
    }

    bool ok() const { return all_ok_; }

private:
    bool all_ok_ = true;
};

} // namespace acceptance
