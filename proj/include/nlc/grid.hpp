#ifndef NLC_GRID_HPP
#define NLC_GRID_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nlc {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/** Uniform n x n grid on the unit torus [0,1)^2.
 *
 * Node (row j, col i) sits at (x, y) = (i h, j h). Spectral index m in [0, n)
 * along y maps to the integer frequency m < n/2 ? m : m - n, so the Nyquist
 * frequency is reported as -n/2. Along x only the non-negative half
 * [0, n/2] is stored (real-to-complex layout); index n/2 is again the
 * Nyquist frequency -n/2.
 */
class GridSpec {
public:
    GridSpec() = default;

    explicit GridSpec(int n) : n_(n)
    {
        if (n < 8 || n % 2 != 0) {
            throw std::invalid_argument("GridSpec: n must be even and >= 8, got " + std::to_string(n));
        }
    }

    int n() const { return n_; }
    double period() const { return 1.0; }
    double spacing() const { return 1.0 / n_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }

    // Complex half-spectrum extents.
    int spectral_rows() const { return n_; }
    int spectral_cols() const { return n_ / 2 + 1; }
    std::size_t spectral_size() const { return static_cast<std::size_t>(n_) * (n_ / 2 + 1); }

    /// Integer frequency of spectral row m (y axis).
    int ky(int m) const { return m < n_ / 2 ? m : m - n_; }
    /// Integer frequency of spectral column m (x axis).
    int kx(int m) const { return m < n_ / 2 ? m : m - n_; }

    bool is_nyquist(int k) const { return k == -n_ / 2; }

    double x(int col) const { return col * spacing(); }
    double y(int row) const { return row * spacing(); }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    int n_ = 8;
};

} // namespace nlc

#endif // NLC_GRID_HPP
