#ifndef VKRL_TRACKMAP_HPP
#define VKRL_TRACKMAP_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vkrl/common.hpp"
#include "vkrl/png_io.hpp"

namespace vkrl {

/// Boolean drivable raster. Row 0 is the bottom row (smallest y); cell (0,0)
/// covers [origin, origin + resolution) in both axes.
struct OccupancyGrid {
    int width = 0;
    int height = 0;
    double resolution = 0.0;
    Vec2 origin;
    std::vector<std::uint8_t> cells;  // 1 = drivable, row-major

    bool in_bounds(int col, int row) const { return col >= 0 && row >= 0 && col < width && row < height; }
    std::size_t index(int col, int row) const { return static_cast<std::size_t>(row) * width + col; }
    bool drivable(int col, int row) const { return in_bounds(col, row) && cells[index(col, row)] != 0; }

    int col_of(double x) const { return static_cast<int>(std::floor((x - origin.x) / resolution)); }
    int row_of(double y) const { return static_cast<int>(std::floor((y - origin.y) / resolution)); }
    Vec2 cell_center(int col, int row) const {
        return {origin.x + (col + 0.5) * resolution, origin.y + (row + 0.5) * resolution};
    }
    std::size_t drivable_count() const {
        return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](auto c) { return c != 0; }));
    }
};

/// Closed polyline; the segment from the last point back to the first is implicit.
class Centerline {
public:
    Centerline() = default;
    explicit Centerline(std::vector<Vec2> points) : points_(std::move(points)) {
        if (points_.size() < 3) throw Error("centerline needs at least 3 points");
        cumulative_.resize(points_.size());
        double s = 0.0;
        for (std::size_t i = 0; i < points_.size(); ++i) {
            cumulative_[i] = s;
            s += distance(points_[i], points_[(i + 1) % points_.size()]);
            if (i + 1 < points_.size() && !(s > cumulative_[i])) throw Error("centerline has repeated points");
        }
        total_ = s;
        if (!(total_ > 0.0)) throw Error("centerline has zero length");
    }

    const std::vector<Vec2>& points() const { return points_; }
    const std::vector<double>& cumulative_arclength() const { return cumulative_; }
    double total_length() const { return total_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }

    std::size_t nearest_index(Vec2 p) const {
        std::size_t best = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < points_.size(); ++i) {
            const double dx = points_[i].x - p.x;
            const double dy = points_[i].y - p.y;
            const double d2 = dx * dx + dy * dy;
            if (d2 < best_d2) {
                best_d2 = d2;
                best = i;
            }
        }
        return best;
    }

    /// Point at arclength s (wrapped into [0, total)), linearly interpolated.
    Vec2 point_at(double s) const {
        s = std::fmod(s, total_);
        if (s < 0) s += total_;
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
        const std::size_t i = static_cast<std::size_t>(std::distance(cumulative_.begin(), it)) - 1;
        const std::size_t j = (i + 1) % points_.size();
        const double seg_end = (j == 0) ? total_ : cumulative_[j];
        const double t = (s - cumulative_[i]) / (seg_end - cumulative_[i]);
        return {points_[i].x + t * (points_[j].x - points_[i].x), points_[i].y + t * (points_[j].y - points_[i].y)};
    }

    /// Unit tangent of the segment leaving point i.
    Vec2 tangent(std::size_t i) const {
        const Vec2 a = points_[i];
        const Vec2 b = points_[(i + 1) % points_.size()];
        const double d = distance(a, b);
        return {(b.x - a.x) / d, (b.y - a.y) / d};
    }

    /// Same loop, renumbered so that index `first` becomes index 0.
    Centerline rotated(std::size_t first) const {
        std::vector<Vec2> pts(points_.size());
        for (std::size_t i = 0; i < points_.size(); ++i) pts[i] = points_[(first + i) % points_.size()];
        return Centerline(std::move(pts));
    }

    Centerline reversed() const {
        std::vector<Vec2> pts(points_.rbegin(), points_.rend());
        return Centerline(std::move(pts));
    }

private:
    std::vector<Vec2> points_;
    std::vector<double> cumulative_;
    double total_ = 0.0;
};

/// Map bundle metadata (`<name>.meta`).
struct TrackMeta {
    double resolution = 0.05;
    Vec2 origin;
    double inflation = 0.15;
    double start_x = 0.0;
    double start_y = 0.0;
    double start_theta = 0.0;
};

namespace detail {

// 1-D squared distance transform (Felzenszwalb & Huttenlocher lower envelope).
inline void edt_1d(const double* f, double* d, int n, std::vector<int>& v, std::vector<double>& z) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    v.assign(static_cast<std::size_t>(n), 0);
    z.assign(static_cast<std::size_t>(n) + 1, 0.0);
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == kInf) continue;
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
            continue;
        }
        double s;
        while (true) {
            const int p = v[static_cast<std::size_t>(k)];
            s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
            if (s <= z[static_cast<std::size_t>(k)]) {
                if (--k < 0) break;
            } else {
                break;
            }
        }
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
            continue;
        }
        ++k;
        v[static_cast<std::size_t>(k)] = q;
        z[static_cast<std::size_t>(k)] = s;
        z[static_cast<std::size_t>(k) + 1] = kInf;
    }
    if (k < 0) {
        for (int q = 0; q < n; ++q) d[q] = kInf;
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[static_cast<std::size_t>(j) + 1] < q) ++j;
        const int p = v[static_cast<std::size_t>(j)];
        d[q] = double(q - p) * (q - p) + f[p];
    }
}

/// Exact Euclidean distance (in cells) from each cell center to the nearest
/// blocked cell center. Cells outside the grid count as blocked.
inline std::vector<double> distance_to_blocked(const OccupancyGrid& g) {
    const int w = g.width + 2;
    const int h = g.height + 2;
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> f(static_cast<std::size_t>(w) * h, 0.0);
    for (int r = 0; r < g.height; ++r)
        for (int c = 0; c < g.width; ++c)
            if (g.cells[g.index(c, r)]) f[static_cast<std::size_t>(r + 1) * w + (c + 1)] = kInf;

    std::vector<int> v;
    std::vector<double> z;
    std::vector<double> in(static_cast<std::size_t>(std::max(w, h)));
    std::vector<double> out(in.size());
    for (int c = 0; c < w; ++c) {
        for (int r = 0; r < h; ++r) in[static_cast<std::size_t>(r)] = f[static_cast<std::size_t>(r) * w + c];
        edt_1d(in.data(), out.data(), h, v, z);
        for (int r = 0; r < h; ++r) f[static_cast<std::size_t>(r) * w + c] = out[static_cast<std::size_t>(r)];
    }
    for (int r = 0; r < h; ++r) {
        double* row = f.data() + static_cast<std::size_t>(r) * w;
        std::copy(row, row + w, in.begin());
        edt_1d(in.data(), row, w, v, z);
    }
    std::vector<double> dist(g.cells.size());
    for (int r = 0; r < g.height; ++r)
        for (int c = 0; c < g.width; ++c)
            dist[g.index(c, r)] = std::sqrt(f[static_cast<std::size_t>(r + 1) * w + (c + 1)]);
    return dist;
}

// Zhang-Suen thinning of the drivable mask.
inline std::vector<std::uint8_t> thin(const OccupancyGrid& g) {
    const int w = g.width;
    const int h = g.height;
    std::vector<std::uint8_t> img = g.cells;
    auto px = [&](int c, int r) -> int { return (c >= 0 && r >= 0 && c < w && r < h) ? (img[g.index(c, r)] != 0) : 0; };
    std::vector<std::size_t> kill;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int pass = 0; pass < 2; ++pass) {
            kill.clear();
            for (int r = 0; r < h; ++r) {
                for (int c = 0; c < w; ++c) {
                    if (!img[g.index(c, r)]) continue;
                    // P2..P9 clockwise starting north; "north" is +row here, which only mirrors the pattern.
                    const std::array<int, 8> n = {px(c, r + 1),     px(c + 1, r + 1), px(c + 1, r),     px(c + 1, r - 1),
                                                  px(c, r - 1),     px(c - 1, r - 1), px(c - 1, r),     px(c - 1, r + 1)};
                    int b = 0;
                    int a = 0;
                    for (int i = 0; i < 8; ++i) {
                        b += n[static_cast<std::size_t>(i)];
                        if (n[static_cast<std::size_t>(i)] == 0 && n[static_cast<std::size_t>((i + 1) % 8)] == 1) ++a;
                    }
                    if (b < 2 || b > 6 || a != 1) continue;
                    const bool ok = pass == 0 ? (n[0] * n[2] * n[4] == 0 && n[2] * n[4] * n[6] == 0)
                                              : (n[0] * n[2] * n[6] == 0 && n[0] * n[4] * n[6] == 0);
                    if (ok) kill.push_back(g.index(c, r));
                }
            }
            for (auto i : kill) img[i] = 0;
            changed = changed || !kill.empty();
        }
    }
    return img;
}

/// Circular moving average over +/- half_window points.
inline std::vector<Vec2> smooth_closed(const std::vector<Vec2>& pts, int half_window) {
    const int n = static_cast<int>(pts.size());
    std::vector<Vec2> out(pts.size());
    for (int i = 0; i < n; ++i) {
        Vec2 acc;
        for (int k = -half_window; k <= half_window; ++k) {
            const Vec2& p = pts[static_cast<std::size_t>(((i + k) % n + n) % n)];
            acc.x += p.x;
            acc.y += p.y;
        }
        const double m = 2.0 * half_window + 1.0;
        out[static_cast<std::size_t>(i)] = {acc.x / m, acc.y / m};
    }
    return out;
}

inline Centerline resample_closed(const Centerline& line, double spacing) {
    const int n = std::max(3, static_cast<int>(std::lround(line.total_length() / spacing)));
    const double step = line.total_length() / n;
    std::vector<Vec2> pts(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pts[static_cast<std::size_t>(i)] = line.point_at(i * step);
    return Centerline(std::move(pts));
}

}  // namespace detail

/// Centerline sample spacing used for extraction, in meters.
inline constexpr double kCenterlineSpacing = 0.05;

/// Extracts the closed centerline of the track through the drivable cell nearest
/// `start`, oriented along `start_theta`. The ridge of the distance transform is
/// approximated by thinning; the loop is the shortest skeleton path that leaves
/// the start pixel forwards and returns to it from behind.
inline Centerline extract_centerline(const OccupancyGrid& grid, Vec2 start, double start_theta) {
    const auto skel = detail::thin(grid);
    const int w = grid.width;
    const int h = grid.height;

    int sc = -1;
    int sr = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (skel[grid.index(c, r)]) {
                const double d = distance(grid.cell_center(c, r), start);
                if (d < best) {
                    best = d;
                    sc = c;
                    sr = r;
                }
            }
    if (sc < 0) throw Error("no closed circuit found");

    const double hx = std::cos(start_theta);
    const double hy = std::sin(start_theta);
    auto on_skel = [&](int c, int r) { return c >= 0 && r >= 0 && c < w && r < h && skel[grid.index(c, r)]; };

    // Exclude the start pixel and its sideways neighbours so the search must go around.
    std::vector<int> parent(skel.size(), -2);
    std::vector<std::uint8_t> target(skel.size(), 0);
    std::deque<std::size_t> queue;
    const std::size_t start_idx = grid.index(sc, sr);
    parent[start_idx] = -1;
    for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
            if ((dc == 0 && dr == 0) || !on_skel(sc + dc, sr + dr)) continue;
            const double dot = dc * hx + dr * hy;
            const std::size_t idx = grid.index(sc + dc, sr + dr);
            if (dot > 1e-9) {
                parent[idx] = static_cast<int>(start_idx);
                queue.push_back(idx);
            } else if (dot < -1e-9) {
                target[idx] = 1;
            } else {
                parent[idx] = -1;  // blocked
            }
        }
    std::size_t hit = start_idx;
    bool found = false;
    while (!queue.empty() && !found) {
        const std::size_t cur = queue.front();
        queue.pop_front();
        const int c = static_cast<int>(cur % static_cast<std::size_t>(w));
        const int r = static_cast<int>(cur / static_cast<std::size_t>(w));
        for (int dr = -1; dr <= 1 && !found; ++dr)
            for (int dc = -1; dc <= 1; ++dc) {
                if ((dc == 0 && dr == 0) || !on_skel(c + dc, r + dr)) continue;
                const std::size_t nb = grid.index(c + dc, r + dr);
                if (parent[nb] != -2) continue;
                parent[nb] = static_cast<int>(cur);
                if (target[nb]) {
                    hit = nb;
                    found = true;
                    break;
                }
                queue.push_back(nb);
            }
    }
    if (!found) throw Error("no closed circuit found");

    std::vector<Vec2> pts;
    for (std::size_t cur = hit; cur != start_idx; cur = static_cast<std::size_t>(parent[cur])) {
        const int c = static_cast<int>(cur % static_cast<std::size_t>(w));
        const int r = static_cast<int>(cur / static_cast<std::size_t>(w));
        pts.push_back(grid.cell_center(c, r));
    }
    pts.push_back(grid.cell_center(sc, sr));
    std::reverse(pts.begin(), pts.end());
    if (pts.size() < 8) throw Error("no closed circuit found");

    pts = detail::smooth_closed(pts, 3);
    pts = detail::smooth_closed(pts, 3);
    return detail::resample_closed(Centerline(std::move(pts)), kCenterlineSpacing);
}

/// Immutable race track: grid, inflated clearance field and the centerline used
/// for progress. Safe for concurrent read-only use.
class TrackMap {
public:
    TrackMap(OccupancyGrid grid, TrackMeta meta, std::optional<Centerline> centerline = std::nullopt)
        : grid_(std::move(grid)), meta_(meta) {
        if (!(grid_.resolution > 0.0) || !std::isfinite(grid_.resolution)) throw Error("invalid resolution");
        if (grid_.width <= 0 || grid_.height <= 0 ||
            grid_.cells.size() != static_cast<std::size_t>(grid_.width) * grid_.height)
            throw Error("grid dimensions do not match cell data");
        if (meta_.inflation < 0.0) throw Error("invalid inflation radius");
        if (grid_.drivable_count() == 0) throw Error("map has zero drivable cells");
        meta_.resolution = grid_.resolution;
        meta_.origin = grid_.origin;

        const auto d = detail::distance_to_blocked(grid_);
        clearance_.resize(d.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            clearance_[i] = grid_.cells[i] ? std::max(0.0, (d[i] - 0.5) * grid_.resolution) : 0.0;

        const Vec2 start{meta_.start_x, meta_.start_y};
        Centerline line = centerline ? *centerline : extract_centerline(grid_, start, meta_.start_theta);
        std::size_t first = line.nearest_index(start);
        const Vec2 t = line.tangent(first);
        if (t.x * std::cos(meta_.start_theta) + t.y * std::sin(meta_.start_theta) < 0.0) {
            line = line.reversed();
            first = line.nearest_index(start);
        }
        centerline_ = line.rotated(first);

        Fnv1a h;
        h.update_value<std::int32_t>(grid_.width);
        h.update_value<std::int32_t>(grid_.height);
        h.update_value(grid_.resolution);
        h.update_value(grid_.origin.x);
        h.update_value(grid_.origin.y);
        h.update_value(meta_.inflation);
        h.update(grid_.cells.data(), grid_.cells.size());
        fingerprint_ = h.digest();
    }

    const OccupancyGrid& grid() const { return grid_; }
    const Centerline& centerline() const { return centerline_; }
    const TrackMeta& meta() const { return meta_; }
    double inflation_radius() const { return meta_.inflation; }
    std::uint64_t fingerprint() const { return fingerprint_; }

    /// Clearance from the cell center to the nearest blocked cell's edge, meters.
    double boundary_distance(int col, int row) const { return clearance_[grid_.index(col, row)]; }

    /// True when the cell is drivable and clear of the inflated boundary.
    bool cell_free(int col, int row) const {
        return grid_.drivable(col, row) && clearance_[grid_.index(col, row)] >= meta_.inflation;
    }

    bool is_on_track(Vec2 p) const {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
        return cell_free(grid_.col_of(p.x), grid_.row_of(p.y));
    }

    /// Fraction of a lap in [0,1) at the centerline point nearest `p`.
    double track_progress(Vec2 p) const {
        if (!is_on_track(p)) throw Error("no progress off track");
        return progress_unchecked(p);
    }

    double progress_unchecked(Vec2 p) const {
        const auto i = centerline_.nearest_index(p);
        return centerline_.cumulative_arclength()[i] / centerline_.total_length();
    }

    Vec2 start_position() const { return {meta_.start_x, meta_.start_y}; }
    double start_heading() const { return meta_.start_theta; }

private:
    OccupancyGrid grid_;
    TrackMeta meta_;
    std::vector<double> clearance_;
    Centerline centerline_;
    std::uint64_t fingerprint_ = 0;
};

/// Unwraps successive progress readings. Jumps larger than half a lap are
/// treated as crossing the start line.
class LapProgress {
public:
    explicit LapProgress(double initial = 0.0) : last_(initial) {}

    /// Returns the unwrapped progress increment in laps.
    double update(double p) {
        double delta = p - last_;
        if (delta < -0.5) delta += 1.0;
        else if (delta > 0.5) delta -= 1.0;
        last_ = p;
        cumulative_ += delta;
        return delta;
    }

    double cumulative() const { return cumulative_; }
    double last() const { return last_; }

private:
    double last_;
    double cumulative_ = 0.0;
};

// ---------------------------------------------------------------------------
// Map bundle I/O

inline TrackMeta read_meta(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open metadata '" + path + "'");
    TrackMeta m;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw Error(path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        double v = 0.0;
        try {
            std::size_t used = 0;
            v = std::stod(val, &used);
            if (used != val.size()) throw std::invalid_argument(val);
        } catch (const std::exception&) {
            throw Error(path + ":" + std::to_string(lineno) + ": bad number for " + key);
        }
        if (key == "resolution_m") m.resolution = v;
        else if (key == "origin_x") m.origin.x = v;
        else if (key == "origin_y") m.origin.y = v;
        else if (key == "inflation_m") m.inflation = v;
        else if (key == "start_x") m.start_x = v;
        else if (key == "start_y") m.start_y = v;
        else if (key == "start_theta") m.start_theta = v;
        else throw Error(path + ":" + std::to_string(lineno) + ": unknown key " + key);
    }
    return m;
}

inline void write_meta(const std::string& path, const TrackMeta& m) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write metadata '" + path + "'");
    out.precision(17);
    out << "resolution_m=" << m.resolution << "\n"
        << "origin_x=" << m.origin.x << "\n"
        << "origin_y=" << m.origin.y << "\n"
        << "inflation_m=" << m.inflation << "\n"
        << "start_x=" << m.start_x << "\n"
        << "start_y=" << m.start_y << "\n"
        << "start_theta=" << m.start_theta << "\n";
}

inline std::vector<Vec2> read_centerline_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open centerline '" + path + "'");
    std::vector<Vec2> pts;
    std::string line;
    while (std::getline(in, line)) {
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        Vec2 p;
        if (ss >> p.x >> p.y) pts.push_back(p);  // header and blank lines fall through
    }
    if (pts.size() > 1 && distance(pts.front(), pts.back()) < 1e-9) pts.pop_back();
    return pts;
}

inline void write_centerline_csv(const std::string& path, const Centerline& line) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write centerline '" + path + "'");
    out.precision(10);
    out << "x_m,y_m\n";
    for (const auto& p : line.points()) out << p.x << "," << p.y << "\n";
}

/// Converts a grayscale image into a grid: luminance >= 50% is drivable.
/// Image row 0 (top) becomes the last grid row.
inline OccupancyGrid grid_from_image(const GrayImage& img, double resolution, Vec2 origin) {
    OccupancyGrid g;
    g.width = img.width;
    g.height = img.height;
    g.resolution = resolution;
    g.origin = origin;
    g.cells.resize(static_cast<std::size_t>(g.width) * g.height);
    for (int r = 0; r < g.height; ++r)
        for (int c = 0; c < g.width; ++c) g.cells[g.index(c, r)] = img.at(c, g.height - 1 - r) >= 128 ? 1 : 0;
    return g;
}

inline GrayImage image_from_grid(const OccupancyGrid& g) {
    GrayImage img;
    img.width = g.width;
    img.height = g.height;
    img.pixels.resize(static_cast<std::size_t>(g.width) * g.height);
    for (int r = 0; r < g.height; ++r)
        for (int c = 0; c < g.width; ++c)
            img.pixels[static_cast<std::size_t>(g.height - 1 - r) * g.width + c] = g.cells[g.index(c, r)] ? 255 : 0;
    return img;
}

/// Loads an image plus metadata. A `<stem>.centerline.csv` next to the image
/// overrides centerline extraction.
inline TrackMap load_track(const std::string& image_path, const TrackMeta& meta) {
    if (!(meta.resolution > 0.0) || !std::isfinite(meta.resolution)) throw Error("invalid resolution");
    const auto img = read_png_gray(image_path);
    auto grid = grid_from_image(img, meta.resolution, meta.origin);
    std::filesystem::path sidecar(image_path);
    sidecar.replace_extension(".centerline.csv");
    std::optional<Centerline> line;
    if (std::filesystem::exists(sidecar)) line = Centerline(read_centerline_csv(sidecar.string()));
    return TrackMap(std::move(grid), meta, std::move(line));
}

/// Strips a trailing .png/.meta so both `maps/loop` and `maps/loop.png` name the bundle.
inline std::string bundle_stem(const std::string& name) {
    std::filesystem::path p(name);
    if (p.extension() == ".png" || p.extension() == ".meta") p.replace_extension();
    return p.string();
}

inline TrackMap load_track_bundle(const std::string& name) {
    const std::string stem = bundle_stem(name);
    if (!std::filesystem::exists(stem + ".png")) throw Error("map image not found: " + stem + ".png");
    return load_track(stem + ".png", read_meta(stem + ".meta"));
}

inline void save_track_bundle(const std::string& name, const TrackMap& map, bool with_centerline) {
    const std::string stem = bundle_stem(name);
    write_png_gray(stem + ".png", image_from_grid(map.grid()));
    write_meta(stem + ".meta", map.meta());
    if (with_centerline) write_centerline_csv(stem + ".centerline.csv", map.centerline());
}

}  // namespace vkrl

#endif  // VKRL_TRACKMAP_HPP
