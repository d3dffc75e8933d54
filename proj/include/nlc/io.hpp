#ifndef NLC_IO_HPP
#define NLC_IO_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "integrator.hpp"
#include "report.hpp"

namespace nlc {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr const char* csv_header =
    "t,E_kin,E_elastic,E_penalty,E_total,D_visc,D_rot,A,norm_v_H1,norm_d_H2,residual";

/// Shortest round-trip-safe text for a double; "nan" for NaN.
inline std::string format_double(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string trajectory_csv(const std::vector<TrajectoryRow>& rows)
{
    std::string out = csv_header;
    out += '\n';
    for (const auto& r : rows) {
        const auto& e = r.energy;
        const double fields[] = {r.t,           e.kinetic,     e.elastic,   e.penalty,  e.total,   e.visc_dissipation,
                                 e.rot_dissipation, e.quantity_a, r.norm_v_h1, r.norm_d_h2, r.residual};
        for (std::size_t i = 0; i < std::size(fields); ++i) {
            if (i) out += ',';
            out += format_double(fields[i]);
        }
        out += '\n';
    }
    return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw IoError("write failed: " + path.string());
}

inline std::string read_text(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline void write_trajectory_csv(const std::filesystem::path& path, const std::vector<TrajectoryRow>& rows)
{
    write_text(path, trajectory_csv(rows));
}

// ---------------------------------------------------------------------------
// Snapshot files: "NLC1", u32 n, f64 t, then v_x, v_y, d_x, d_y (row-major),
// all little-endian.
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
void put_le(std::string& buf, T value)
{
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    buf.append(bytes.data(), bytes.size());
}

template <typename T>
T get_le(const std::string& buf, std::size_t& pos)
{
    if (pos + sizeof(T) > buf.size()) throw IoError("snapshot truncated");
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), buf.data() + pos, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    pos += sizeof(T);
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

} // namespace detail

inline std::string encode_snapshot(const State& s)
{
    const GridSpec& g = s.grid();
    std::string buf = "NLC1";
    buf.reserve(4 + 4 + 8 + 4 * g.size() * 8);
    detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(g.n()));
    detail::put_le<double>(buf, s.t);
    for (const ScalarField* f : {&s.v[0], &s.v[1], &s.d[0], &s.d[1]}) {
        for (double x : f->values) detail::put_le<double>(buf, x);
    }
    return buf;
}

inline State decode_snapshot(const std::string& buf)
{
    if (buf.size() < 4 || buf.compare(0, 4, "NLC1") != 0) throw IoError("snapshot: bad magic");
    std::size_t pos = 4;
    const auto n = detail::get_le<std::uint32_t>(buf, pos);
    const GridSpec g(static_cast<int>(n));
    State s{VectorField2(g), VectorField2(g), 0.0};
    s.t = detail::get_le<double>(buf, pos);
    for (ScalarField* f : {&s.v[0], &s.v[1], &s.d[0], &s.d[1]}) {
        for (double& x : f->values) x = detail::get_le<double>(buf, pos);
    }
    if (pos != buf.size()) throw IoError("snapshot: trailing bytes");
    return s;
}

inline void write_snapshot(const std::filesystem::path& path, const State& s) { write_text(path, encode_snapshot(s)); }

inline State read_snapshot(const std::filesystem::path& path) { return decode_snapshot(read_text(path)); }

inline std::string snapshot_name(long step)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "snap_%08ld.bin", step);
    return buf;
}

/// Writes every snapshot of a trajectory into dir; returns the paths.
inline std::vector<std::filesystem::path> write_snapshots(const std::filesystem::path& dir,
                                                          const std::vector<Snapshot>& snaps)
{
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> paths;
    for (const auto& s : snaps) {
        paths.push_back(dir / snapshot_name(s.step));
        write_snapshot(paths.back(), s.state);
    }
    return paths;
}

// ---------------------------------------------------------------------------
// Experiment reports.
// ---------------------------------------------------------------------------

inline std::string report_csv(const ExperimentReport& r)
{
    std::string out = "name,value,relation,tolerance,pass\n";
    auto row = [&](const std::string& name, const std::string& value, const std::string& rel,
                   const std::string& tol, const std::string& pass) {
        out += name + ',' + value + ',' + rel + ',' + tol + ',' + pass + '\n';
    };
    row("experiment:" + r.name, "", "", "", to_string(r.status));
    row("inputs_digest:" + r.inputs_digest, "", "", "", "");
    for (const auto& f : r.findings) {
        const bool info = f.relation == "info";
        row(f.name, format_double(f.value), f.relation, info ? "" : format_double(f.tolerance),
            info ? "" : (f.pass ? "true" : "false"));
    }
    for (std::string note : r.notes) {
        std::replace(note.begin(), note.end(), ',', ';');
        row("note:" + note, "", "", "", "");
    }
    return out;
}

inline void write_report(const std::filesystem::path& path, const ExperimentReport& r)
{
    write_text(path, report_csv(r));
}

} // namespace nlc

#endif // NLC_IO_HPP
