#ifndef NLC_REPORT_HPP
#define NLC_REPORT_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace nlc {

enum class Status { pass, fail, inconclusive, error };

inline const char* to_string(Status s)
{
    switch (s) {
    case Status::pass: return "PASS";
    case Status::fail: return "FAIL";
    case Status::inconclusive: return "INCONCLUSIVE";
    case Status::error: return "ERROR";
    }
    return "ERROR";
}

/// A scalar outcome and the threshold it was judged against.
struct Finding {
    std::string name;
    double value = 0.0;
    std::string relation;  // "<=", "<", ">=", ">", "info"
    double tolerance = 0.0;
    bool pass = true;
};

inline bool compare(double value, const std::string& relation, double tol)
{
    if (relation == "<=") return value <= tol;
    if (relation == "<") return value < tol;
    if (relation == ">=") return value >= tol;
    if (relation == ">") return value > tol;
    return true;
}

struct ExperimentReport {
    std::string name;
    std::string inputs_digest;
    std::vector<Finding> findings;
    std::vector<std::string> notes;
    std::vector<std::string> artifacts;
    Status status = Status::pass;

    /// Records a judged finding; a failing one turns a passing report into FAIL.
    Finding& add(std::string finding, double value, std::string relation, double tolerance)
    {
        Finding f{std::move(finding), value, std::move(relation), tolerance, true};
        f.pass = compare(value, f.relation, tolerance) && !std::isnan(value);
        if (f.relation == "info") f.pass = true;
        if (!f.pass && status == Status::pass) status = Status::fail;
        findings.push_back(std::move(f));
        return findings.back();
    }

    /// Informational value, never judged.
    Finding& info(std::string finding, double value) { return add(std::move(finding), value, "info", 0.0); }

    bool passed() const { return status == Status::pass; }

    const Finding* find(const std::string& key) const
    {
        for (const auto& f : findings) {
            if (f.name == key) return &f;
        }
        return nullptr;
    }

    std::string summary() const
    {
        std::string s = std::string(to_string(status)) + " " + name;
        for (const auto& f : findings) {
            if (f.relation == "info") continue;
            char buf[160];
            std::snprintf(buf, sizeof buf, " %s=%.6g%s%.6g", f.name.c_str(), f.value, f.relation.c_str(), f.tolerance);
            s += buf;
        }
        return s;
    }
};

/// 64-bit FNV-1a, hex encoded. Stable across platforms, unlike std::hash.
inline std::string digest(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace nlc

#endif // NLC_REPORT_HPP
