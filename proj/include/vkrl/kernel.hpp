#ifndef VKRL_KERNEL_HPP
#define VKRL_KERNEL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "vkrl/common.hpp"
#include "vkrl/dynamics.hpp"
#include "vkrl/trackmap.hpp"

namespace vkrl {

/// Resolution of the discrete (x, y, theta) state space and the planning step.
struct DiscretizationSpec {
    int cells_per_meter = 40;
    int num_theta = 41;
    int num_modes = 9;
    double dt = 0.1;
    double speed = 2.0;
    // Require a mode to be safe from every corner of the cell at the bin's
    // extreme and center headings, not just from the representative pose.
    // Without it the shield can reach members with no safe successor.
    bool conservative = true;

    void validate() const {
        if (cells_per_meter < 1 || num_theta < 1 || num_modes < 1) throw Error("discretization counts must be >= 1");
        if (num_modes % 2 == 0) throw Error("mode count must be odd");
        if (!(dt > 0.0)) throw Error("kernel dt must be positive");
        if (!(speed >= 0.0)) throw Error("kernel speed must be non-negative");
    }

    double cell_size() const { return 1.0 / cells_per_meter; }
    double theta_bin_width() const { return kTwoPi / num_theta; }
    double theta_center(int bin) const { return -kPi + (bin + 0.5) * theta_bin_width(); }
    int theta_bin(double theta) const {
        const int b = static_cast<int>(std::floor((wrap_angle(theta) + kPi) / theta_bin_width()));
        return std::clamp(b, 0, num_theta - 1);
    }
};

struct ControlModes {
    std::vector<double> deltas;
};

inline ControlModes control_modes(const VehicleParams& params, const DiscretizationSpec& spec) {
    if (spec.num_modes < 1 || spec.num_modes % 2 == 0) throw Error("mode count must be odd");
    ControlModes m;
    m.deltas.resize(static_cast<std::size_t>(spec.num_modes));
    const int half = spec.num_modes / 2;
    for (int i = 0; i < spec.num_modes; ++i) {
        // built from the middle out so the set is exactly symmetric
        m.deltas[static_cast<std::size_t>(i)] = half == 0 ? 0.0 : params.delta_max * static_cast<double>(i - half) / half;
    }
    return m;
}

/// Cell index triple. `off_grid` marks positions outside the kernel raster.
struct StateIndex {
    int ix = 0;
    int iy = 0;
    int itheta = 0;
    bool off_grid = false;

    bool operator==(const StateIndex&) const = default;
};

/// Kernel raster geometry derived from a map and a discretization.
struct KernelGrid {
    Vec2 origin;
    int nx = 0;
    int ny = 0;

    static KernelGrid from_map(const TrackMap& map, const DiscretizationSpec& spec) {
        const auto& g = map.grid();
        KernelGrid k;
        k.origin = g.origin;
        k.nx = static_cast<int>(std::ceil(g.width * g.resolution * spec.cells_per_meter - 1e-9));
        k.ny = static_cast<int>(std::ceil(g.height * g.resolution * spec.cells_per_meter - 1e-9));
        return k;
    }
};

inline StateIndex discretize(const VehicleState& s, const DiscretizationSpec& spec, const KernelGrid& kg) {
    StateIndex i;
    const double fx = std::floor((s.x - kg.origin.x) * spec.cells_per_meter);
    const double fy = std::floor((s.y - kg.origin.y) * spec.cells_per_meter);
    i.itheta = spec.theta_bin(s.theta);
    if (!std::isfinite(fx) || !std::isfinite(fy) || fx < 0 || fy < 0 || fx >= kg.nx || fy >= kg.ny) {
        i.off_grid = true;
        i.ix = -1;
        i.iy = -1;
        return i;
    }
    i.ix = static_cast<int>(fx);
    i.iy = static_cast<int>(fy);
    return i;
}

inline StateIndex discretize(const VehicleState& s, const DiscretizationSpec& spec, const TrackMap& map) {
    return discretize(s, spec, KernelGrid::from_map(map, spec));
}

/// One (theta-bin, mode) entry: successor cell offsets and theta-bins. The
/// representative table holds one successor; the conservative table holds
/// the distinct successors of the cell corners at the bin's extreme and
/// center headings.
struct Transition {
    static constexpr int kMaxSamples = 12;
    struct Target {
        int dx = 0;
        int dy = 0;
        int theta = 0;
        bool operator==(const Target&) const = default;
    };
    std::array<Target, kMaxSamples> targets{};
    int count = 1;
};

class TransitionTable {
public:
    TransitionTable(int num_theta, int num_modes) : num_theta_(num_theta), num_modes_(num_modes),
        entries_(static_cast<std::size_t>(num_theta) * num_modes) {}

    const Transition& at(int theta_bin, int mode) const {
        return entries_[static_cast<std::size_t>(theta_bin) * num_modes_ + mode];
    }
    Transition& at(int theta_bin, int mode) { return entries_[static_cast<std::size_t>(theta_bin) * num_modes_ + mode]; }
    int num_theta() const { return num_theta_; }
    int num_modes() const { return num_modes_; }
    std::size_t size() const { return entries_.size(); }

private:
    int num_theta_;
    int num_modes_;
    std::vector<Transition> entries_;
};

/// Successor of every (theta-bin, mode). Translation invariance lets one table
/// serve all cells. Offsets are the floor of the successor position in cells,
/// measured from the cell's lower-left corner.
inline TransitionTable build_transition_table(const DiscretizationSpec& spec, const ControlModes& modes,
                                              const VehicleParams& params) {
    spec.validate();
    TransitionTable table(spec.num_theta, static_cast<int>(modes.deltas.size()));
    const double cs = spec.cell_size();
    const double half_bin = 0.5 * spec.theta_bin_width();
    constexpr double kInset = 1e-6;
    const std::array<std::array<double, 2>, 4> corners = {{{kInset, kInset}, {1 - kInset, kInset},
                                                          {kInset, 1 - kInset}, {1 - kInset, 1 - kInset}}};
    const std::array<double, 3> headings = {-(1 - kInset) * half_bin, 0.0, (1 - kInset) * half_bin};
    for (int b = 0; b < spec.num_theta; ++b) {
        for (int m = 0; m < table.num_modes(); ++m) {
            const ControlAction a{modes.deltas[static_cast<std::size_t>(m)], spec.speed};
            Transition& t = table.at(b, m);
            auto target_of = [&](double fx, double fy, double dtheta) {
                const VehicleState from{fx * cs, fy * cs, spec.theta_center(b) + dtheta};
                const VehicleState n = step(from, a, spec.dt, params);
                return Transition::Target{static_cast<int>(std::floor(n.x / cs)), static_cast<int>(std::floor(n.y / cs)),
                                          spec.theta_bin(n.theta)};
            };
            if (!spec.conservative) {
                t.count = 1;
                t.targets[0] = target_of(0.5, 0.5, 0.0);
                continue;
            }
            t.count = 0;
            for (double dh : headings)
                for (const auto& c : corners) {
                    const auto tgt = target_of(c[0], c[1], dh);
                    const auto end = t.targets.begin() + t.count;
                    if (std::find(t.targets.begin(), end, tgt) == end) t.targets[static_cast<std::size_t>(t.count++)] = tgt;
                }
        }
    }
    return table;
}

/// Discrete viability kernel: membership over (x-cell, y-cell, theta-bin),
/// stored (x, y, theta) row-major.
struct SafetyKernel {
    DiscretizationSpec spec;
    double wheelbase = 0.0;
    double delta_max = 0.0;
    KernelGrid grid;
    std::vector<std::uint8_t> membership;
    int iterations_to_fixpoint = 0;
    std::uint64_t map_fingerprint = 0;

    std::size_t index(int ix, int iy, int it) const {
        return (static_cast<std::size_t>(ix) * grid.ny + iy) * spec.num_theta + it;
    }
    bool contains(int ix, int iy, int it) const {
        return ix >= 0 && iy >= 0 && ix < grid.nx && iy < grid.ny && membership[index(ix, iy, it)] != 0;
    }
    bool contains(const StateIndex& i) const { return !i.off_grid && contains(i.ix, i.iy, i.itheta); }
    std::size_t member_count() const {
        return static_cast<std::size_t>(std::count(membership.begin(), membership.end(), std::uint8_t{1}));
    }
};

namespace detail {

// Whether some mode leads from (ix, iy, it) into `set`.
inline bool has_viable_mode(const std::vector<std::uint8_t>& set, const KernelGrid& kg, int num_theta,
                            const TransitionTable& table, int ix, int iy, int it) {
    for (int m = 0; m < table.num_modes(); ++m) {
        const Transition& t = table.at(it, m);
        bool ok = true;
        for (int k = 0; k < t.count && ok; ++k) {
            const auto& tgt = t.targets[static_cast<std::size_t>(k)];
            const int x = ix + tgt.dx;
            const int y = iy + tgt.dy;
            ok = x >= 0 && y >= 0 && x < kg.nx && y < kg.ny &&
                 set[(static_cast<std::size_t>(x) * kg.ny + y) * num_theta + tgt.theta] != 0;
        }
        if (ok) return true;
    }
    return false;
}

}  // namespace detail

/// One synchronous sweep: next = { s in cur | some mode's successor in cur }.
/// Returns the number of states removed. Results do not depend on `workers`.
inline std::size_t kernel_sweep(const std::vector<std::uint8_t>& cur, std::vector<std::uint8_t>& next,
                                const KernelGrid& kg, int num_theta, const TransitionTable& table, int workers = 1) {
    next.resize(cur.size());
    workers = std::max(1, std::min(workers, kg.nx));
    std::vector<std::size_t> removed(static_cast<std::size_t>(workers), 0);
    auto run = [&](int w) {
        const int x0 = static_cast<int>(static_cast<long long>(kg.nx) * w / workers);
        const int x1 = static_cast<int>(static_cast<long long>(kg.nx) * (w + 1) / workers);
        std::size_t r = 0;
        for (int ix = x0; ix < x1; ++ix)
            for (int iy = 0; iy < kg.ny; ++iy)
                for (int it = 0; it < num_theta; ++it) {
                    const std::size_t i = (static_cast<std::size_t>(ix) * kg.ny + iy) * num_theta + it;
                    if (!cur[i]) {
                        next[i] = 0;
                        continue;
                    }
                    const bool keep = detail::has_viable_mode(cur, kg, num_theta, table, ix, iy, it);
                    next[i] = keep ? 1 : 0;
                    if (!keep) ++r;
                }
        removed[static_cast<std::size_t>(w)] = r;
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }
    std::size_t total = 0;
    for (auto r : removed) total += r;
    return total;
}

/// Initial set: every theta-bin of every cell whose center and inset corners are on track.
inline std::vector<std::uint8_t> track_states(const TrackMap& map, const DiscretizationSpec& spec, const KernelGrid& kg) {
    std::vector<std::uint8_t> set(static_cast<std::size_t>(kg.nx) * kg.ny * spec.num_theta, 0);
    const double cs = spec.cell_size();
    constexpr double kInset = 1e-6;
    for (int ix = 0; ix < kg.nx; ++ix)
        for (int iy = 0; iy < kg.ny; ++iy) {
            const double x0 = kg.origin.x + ix * cs;
            const double y0 = kg.origin.y + iy * cs;
            const bool free = map.is_on_track({x0 + 0.5 * cs, y0 + 0.5 * cs}) &&
                              map.is_on_track({x0 + kInset * cs, y0 + kInset * cs}) &&
                              map.is_on_track({x0 + (1 - kInset) * cs, y0 + kInset * cs}) &&
                              map.is_on_track({x0 + kInset * cs, y0 + (1 - kInset) * cs}) &&
                              map.is_on_track({x0 + (1 - kInset) * cs, y0 + (1 - kInset) * cs});
            if (!free) continue;
            std::fill_n(set.begin() + static_cast<std::ptrdiff_t>((static_cast<std::size_t>(ix) * kg.ny + iy) * spec.num_theta),
                        spec.num_theta, std::uint8_t{1});
        }
    return set;
}

struct KernelBuildOptions {
    int workers = 1;
    int max_iterations = 500;
    /// Called with (sweep index, member count) for K^0 and after each sweep.
    std::function<void(int, std::size_t)> on_iteration;
};

/// Fixed-point viability iteration, starting from every on-track state and
/// removing states with no successor in the current set until nothing changes.
inline SafetyKernel compute_kernel(const TrackMap& map, const DiscretizationSpec& spec, const ControlModes& modes,
                                   const VehicleParams& params, const KernelBuildOptions& opts = {}) {
    spec.validate();
    if (static_cast<int>(modes.deltas.size()) != spec.num_modes) throw Error("mode list does not match spec");
    SafetyKernel k;
    k.spec = spec;
    k.wheelbase = params.wheelbase;
    k.delta_max = params.delta_max;
    k.grid = KernelGrid::from_map(map, spec);
    k.map_fingerprint = map.fingerprint();

    const auto table = build_transition_table(spec, modes, params);
    std::vector<std::uint8_t> cur = track_states(map, spec, k.grid);
    std::vector<std::uint8_t> next;
    std::size_t count = static_cast<std::size_t>(std::count(cur.begin(), cur.end(), std::uint8_t{1}));
    if (count == 0) throw Error("map has zero drivable cells at kernel resolution");
    if (opts.on_iteration) opts.on_iteration(0, count);

    int iter = 0;
    while (true) {
        if (iter >= opts.max_iterations)
            throw Error("kernel did not converge within " + std::to_string(opts.max_iterations) + " iterations");
        const std::size_t removed = kernel_sweep(cur, next, k.grid, spec.num_theta, table, opts.workers);
        if (removed == 0) break;
        cur.swap(next);
        count -= removed;
        ++iter;
        if (opts.on_iteration) opts.on_iteration(iter, count);
        if (count == 0) throw Error("track unviable at this speed/steering");
    }
    k.membership = std::move(cur);
    k.iterations_to_fixpoint = iter;
    return k;
}

inline void check_kernel_matches(const SafetyKernel& kernel, const TrackMap& map) {
    if (kernel.map_fingerprint != map.fingerprint()) throw Error("kernel/map mismatch");
}

inline bool is_safe(const SafetyKernel& kernel, const TrackMap& map, const VehicleState& s) {
    check_kernel_matches(kernel, map);
    return kernel.contains(discretize(s, kernel.spec, kernel.grid));
}

// ---------------------------------------------------------------------------
// .vk file: magic, version, spec, grid, fingerprint, bit-packed membership,
// FNV-1a checksum of the packed bits. All little-endian.

inline constexpr char kKernelMagic[8] = {'V', 'I', 'A', 'B', 'K', 'R', 'N', 'L'};
inline constexpr std::uint32_t kKernelVersion = 1;

inline void save_kernel(const std::string& path, const SafetyKernel& k) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write kernel file '" + path + "'");
    out.write(kKernelMagic, sizeof(kKernelMagic));
    io::write_le<std::uint32_t>(out, kKernelVersion);
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(k.spec.cells_per_meter));
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(k.spec.num_theta));
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(k.spec.num_modes));
    io::write_le<double>(out, k.spec.dt);
    io::write_le<double>(out, k.spec.speed);
    io::write_le<std::uint8_t>(out, k.spec.conservative ? 1 : 0);
    io::write_le<double>(out, k.wheelbase);
    io::write_le<double>(out, k.delta_max);
    io::write_le<double>(out, k.grid.origin.x);
    io::write_le<double>(out, k.grid.origin.y);
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(k.grid.nx));
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(k.grid.ny));
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(k.iterations_to_fixpoint));
    io::write_le<std::uint64_t>(out, k.map_fingerprint);
    std::vector<std::uint8_t> packed((k.membership.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < k.membership.size(); ++i)
        if (k.membership[i]) packed[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    io::write_le<std::uint64_t>(out, packed.size());
    out.write(reinterpret_cast<const char*>(packed.data()), static_cast<std::streamsize>(packed.size()));
    Fnv1a h;
    h.update(packed.data(), packed.size());
    io::write_le<std::uint64_t>(out, h.digest());
    if (!out) throw Error("failed writing kernel file '" + path + "'");
}

inline SafetyKernel load_kernel(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("kernel file not found: " + path);
    char magic[8] = {};
    if (!in.read(magic, sizeof(magic)) || !std::equal(magic, magic + 8, kKernelMagic))
        throw Error("corrupt kernel header in '" + path + "'");
    const auto version = io::read_le<std::uint32_t>(in, "kernel version");
    if (version != kKernelVersion) throw Error("unsupported kernel format version " + std::to_string(version));
    SafetyKernel k;
    k.spec.cells_per_meter = static_cast<int>(io::read_le<std::uint32_t>(in, "kernel header"));
    k.spec.num_theta = static_cast<int>(io::read_le<std::uint32_t>(in, "kernel header"));
    k.spec.num_modes = static_cast<int>(io::read_le<std::uint32_t>(in, "kernel header"));
    k.spec.dt = io::read_le<double>(in, "kernel header");
    k.spec.speed = io::read_le<double>(in, "kernel header");
    k.spec.conservative = io::read_le<std::uint8_t>(in, "kernel header") != 0;
    k.wheelbase = io::read_le<double>(in, "kernel header");
    k.delta_max = io::read_le<double>(in, "kernel header");
    k.grid.origin.x = io::read_le<double>(in, "kernel header");
    k.grid.origin.y = io::read_le<double>(in, "kernel header");
    k.grid.nx = static_cast<int>(io::read_le<std::uint32_t>(in, "kernel header"));
    k.grid.ny = static_cast<int>(io::read_le<std::uint32_t>(in, "kernel header"));
    k.iterations_to_fixpoint = static_cast<int>(io::read_le<std::uint32_t>(in, "kernel header"));
    k.map_fingerprint = io::read_le<std::uint64_t>(in, "kernel header");
    try {
        k.spec.validate();
    } catch (const Error&) {
        throw Error("corrupt kernel header in '" + path + "'");
    }
    if (k.grid.nx <= 0 || k.grid.ny <= 0 || k.grid.nx > (1 << 20) || k.grid.ny > (1 << 20))
        throw Error("corrupt kernel header in '" + path + "'");
    const std::size_t n = static_cast<std::size_t>(k.grid.nx) * k.grid.ny * k.spec.num_theta;
    const auto packed_size = io::read_le<std::uint64_t>(in, "kernel header");
    if (packed_size != (n + 7) / 8) throw Error("corrupt kernel header in '" + path + "'");
    std::vector<std::uint8_t> packed(packed_size);
    if (!in.read(reinterpret_cast<char*>(packed.data()), static_cast<std::streamsize>(packed_size)))
        throw Error("kernel file truncated: " + path);
    const auto checksum = io::read_le<std::uint64_t>(in, "kernel checksum");
    Fnv1a h;
    h.update(packed.data(), packed.size());
    if (h.digest() != checksum) throw Error("kernel checksum mismatch in '" + path + "'");
    k.membership.resize(n);
    for (std::size_t i = 0; i < n; ++i) k.membership[i] = (packed[i / 8] >> (i % 8)) & 1u;
    return k;
}

inline SafetyKernel load_kernel(const std::string& path, const TrackMap& map) {
    auto k = load_kernel(path);
    check_kernel_matches(k, map);
    return k;
}

}  // namespace vkrl

#endif  // VKRL_KERNEL_HPP
