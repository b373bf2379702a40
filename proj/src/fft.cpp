#include "rlab/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace rlab {
namespace {

std::mutex planner_mutex;

struct PlanKey {
    int dim, n;
    unsigned axes_mask;
    int sign;
    auto operator<=>(const PlanKey&) const = default;
};

// Plans are created with FFTW_UNALIGNED so they can be replayed on any
// std::vector buffer via fftw_execute_dft.
fftw_plan get_plan(const GridSpec& g, const std::array<bool, 4>& axes, int sign, cplx* data) {
    unsigned mask = 0;
    for (int a = 0; a < g.dim; ++a)
        if (axes[a]) mask |= 1u << a;

    static std::map<PlanKey, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(planner_mutex);
    PlanKey key{g.dim, g.n, mask, sign};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    fftw_iodim64 dims[4], loops[4];
    int rank = 0, howmany_rank = 0;
    for (int a = 0; a < g.dim; ++a) {
        fftw_iodim64 io{g.n, static_cast<ptrdiff_t>(g.stride(a)),
                        static_cast<ptrdiff_t>(g.stride(a))};
        if (axes[a])
            dims[rank++] = io;
        else
            loops[howmany_rank++] = io;
    }
    auto* raw = reinterpret_cast<fftw_complex*>(data);
    fftw_plan p = fftw_plan_guru64_dft(rank, dims, howmany_rank, loops, raw, raw,
                                       sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    require(p != nullptr, "fft: FFTW failed to build a plan");
    cache.emplace(key, p);
    return p;
}

// Multiply values[j] by (-1)^{sum of j_a over selected axes}.
void apply_alternating_sign(Field& f, const std::array<bool, 4>& axes) {
    const int n = f.grid.n;
    const int d = f.grid.dim;
    int sel[4], nsel = 0;
    for (int a = 0; a < d; ++a)
        if (axes[a]) sel[nsel++] = a;
    if (nsel == 0) return;

    std::array<int, 4> idx{0, 0, 0, 0};
    cplx* v = f.values.data();
    const std::size_t total = f.values.size();
    int parity = 0;
    for (std::size_t lin = 0; lin < total; ++lin) {
        if (parity) v[lin] = -v[lin];
        // Advance the multi-index and the tracked parity. An increment flips
        // the parity of a selected axis; so does a wrap n-1 -> 0 for even n.
        for (int a = d - 1; a >= 0; --a) {
            if (axes[a]) parity ^= 1;
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
    }
}

} // namespace

namespace detail {

void transform_axes(Field& f, const std::array<bool, 4>& axes, int sign) {
    int count = 0;
    for (int a = 0; a < f.grid.dim; ++a)
        if (axes[a]) ++count;
    if (count == 0) return;

    fftw_plan p = get_plan(f.grid, axes, sign, f.values.data());

    apply_alternating_sign(f, axes);
    auto* raw = reinterpret_cast<fftw_complex*>(f.values.data());
    fftw_execute_dft(p, raw, raw);
    apply_alternating_sign(f, axes);

    // scale, folding in the constant (-1)^{count * N/2} from the centered
    // frequency offset
    double scale = sign < 0 ? std::pow(f.grid.dx(), count)
                            : std::pow(f.grid.dxi() / (2.0 * kPi), count);
    if ((static_cast<long long>(count) * (f.grid.n / 2)) % 2 != 0) scale = -scale;
    for (cplx& z : f.values) z *= scale;
}

} // namespace detail

Field forward_transform(const Field& f) {
    require(f.side == Side::Physical, "forward_transform: field must be physical-side");
    Field out = f;
    std::array<bool, 4> axes{false, false, false, false};
    for (int a = 0; a < f.grid.dim; ++a) axes[a] = true;
    detail::transform_axes(out, axes, -1);
    out.side = Side::Frequency;
    out.transformed = axes;
    return out;
}

Field inverse_transform(const Field& fhat) {
    require(fhat.side == Side::Frequency, "inverse_transform: field must be frequency-side");
    require(fhat.fully_transformed(), "inverse_transform: all axes must be transformed");
    Field out = fhat;
    std::array<bool, 4> axes{false, false, false, false};
    for (int a = 0; a < fhat.grid.dim; ++a) axes[a] = true;
    detail::transform_axes(out, axes, +1);
    out.side = Side::Physical;
    out.transformed = {false, false, false, false};
    return out;
}

Field partial_transform(const Field& f, int axis) {
    require(f.side == Side::Physical, "partial_transform: field must be physical-side");
    require(axis >= 0 && axis < f.grid.dim, "partial_transform: axis out of range");
    Field out = f;
    std::array<bool, 4> axes{false, false, false, false};
    axes[axis] = true;
    detail::transform_axes(out, axes, -1);
    out.side = Side::Frequency;
    out.transformed[axis] = true;
    return out;
}

Field partial_inverse_transform(const Field& f, int axis) {
    require(axis >= 0 && axis < f.grid.dim, "partial_inverse_transform: axis out of range");
    require(f.transformed[axis], "partial_inverse_transform: axis is not transformed");
    Field out = f;
    std::array<bool, 4> axes{false, false, false, false};
    axes[axis] = true;
    detail::transform_axes(out, axes, +1);
    out.transformed[axis] = false;
    bool any = false;
    for (int a = 0; a < f.grid.dim; ++a) any = any || out.transformed[a];
    if (!any) out.side = Side::Physical;
    return out;
}

} // namespace rlab
