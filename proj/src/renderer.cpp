#include "vcam/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "vcam/error.hpp"

namespace vcam {

namespace {

constexpr double kMinDistance = 1e-9;
constexpr int kCellBias = 32768;

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform double in [0, 1) from the top 53 bits.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

Rgb random_albedo(std::mt19937_64& rng) {
    Rgb c{};
    for (auto& v : c) v = static_cast<std::uint8_t>(std::lround(unit(rng) * 255.0));
    return c;
}

double hit_sphere(const Sphere& s, const Vec3& origin, const Vec3& dir) {
    const Vec3 oc = origin - s.center;
    const double b = oc.dot(dir);
    const double c = oc.squaredNorm() - s.radius * s.radius;
    const double disc = b * b - c;
    if (disc < 0.0) return -1.0;
    const double root = std::sqrt(disc);
    double t = -b - root;
    if (t > kMinDistance) return t;
    t = -b + root;
    return t > kMinDistance ? t : -1.0;
}

// Möller-Trumbore, two-sided.
double hit_triangle(const Triangle& tri, const Vec3& origin, const Vec3& dir) {
    const Vec3 e1 = tri.v1 - tri.v0;
    const Vec3 e2 = tri.v2 - tri.v0;
    const Vec3 p = dir.cross(e2);
    const double det = e1.dot(p);
    if (std::abs(det) < 1e-14) return -1.0;
    const double inv = 1.0 / det;
    const Vec3 s = origin - tri.v0;
    const double u = s.dot(p) * inv;
    if (u < 0.0 || u > 1.0) return -1.0;
    const Vec3 q = s.cross(e1);
    const double v = dir.dot(q) * inv;
    if (v < 0.0 || u + v > 1.0) return -1.0;
    const double t = e2.dot(q) * inv;
    return t > kMinDistance ? t : -1.0;
}

Rgb albedo_of(const SyntheticScene& scene, int primitive) {
    const auto n = static_cast<int>(scene.spheres.size());
    if (primitive < n) return scene.spheres[static_cast<std::size_t>(primitive)].albedo;
    return scene.triangles[static_cast<std::size_t>(primitive - n)].albedo;
}

std::uint64_t cell_coord(double x, double cell_size) {
    const double c = std::floor(x / cell_size);
    const double clamped = std::clamp(c, static_cast<double>(-kCellBias), static_cast<double>(kCellBias - 1));
    return static_cast<std::uint64_t>(static_cast<std::int64_t>(clamped) + kCellBias);
}

void check_frame_matches(const Frame& frame, const Intrinsics& k) {
    if (frame.width != k.width || frame.height != k.height ||
        frame.rgb.size() != static_cast<std::size_t>(frame.width) * static_cast<std::size_t>(frame.height) * 3)
        throw Error(ErrorKind::invalid_argument, "frame dimensions do not match camera intrinsics");
}

}  // namespace

Frame::Frame(int w, int h, Rgb fill) : width(w), height(h) {
    if (w < 0 || h < 0) throw Error(ErrorKind::invalid_argument, "negative frame size");
    rgb.resize(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3);
    for (std::size_t i = 0; i < rgb.size(); i += 3) std::copy(fill.begin(), fill.end(), rgb.begin() + static_cast<long>(i));
}

Rgb Frame::pixel(int row, int col) const {
    const std::size_t at = (static_cast<std::size_t>(row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(col)) * 3;
    return {rgb[at], rgb[at + 1], rgb[at + 2]};
}

void Frame::set_pixel(int row, int col, Rgb value) {
    const std::size_t at = (static_cast<std::size_t>(row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(col)) * 3;
    rgb[at] = value[0];
    rgb[at + 1] = value[1];
    rgb[at + 2] = value[2];
}

std::uint64_t content_hash(const Frame& frame) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto feed = [&h](std::uint8_t byte) {
        h ^= byte;
        h *= 0x100000001b3ULL;
    };
    for (int shift = 0; shift < 32; shift += 8) feed(static_cast<std::uint8_t>(static_cast<std::uint32_t>(frame.width) >> shift));
    for (int shift = 0; shift < 32; shift += 8) feed(static_cast<std::uint8_t>(static_cast<std::uint32_t>(frame.height) >> shift));
    for (auto b : frame.rgb) feed(b);
    return h;
}

SyntheticScene SyntheticScene::translated(const Vec3& offset) const {
    SyntheticScene out = *this;
    for (auto& s : out.spheres) s.center += offset;
    for (auto& t : out.triangles) {
        t.v0 += offset;
        t.v1 += offset;
        t.v2 += offset;
    }
    return out;
}

bool SyntheticScene::operator==(const SyntheticScene& other) const {
    if (seed != other.seed || cell_size != other.cell_size || spheres.size() != other.spheres.size() ||
        triangles.size() != other.triangles.size())
        return false;
    for (std::size_t i = 0; i < spheres.size(); ++i) {
        const auto& a = spheres[i];
        const auto& b = other.spheres[i];
        if (a.center != b.center || a.radius != b.radius || a.albedo != b.albedo) return false;
    }
    for (std::size_t i = 0; i < triangles.size(); ++i) {
        const auto& a = triangles[i];
        const auto& b = other.triangles[i];
        if (a.v0 != b.v0 || a.v1 != b.v1 || a.v2 != b.v2 || a.albedo != b.albedo) return false;
    }
    return true;
}

SyntheticScene build_scene(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    SyntheticScene scene;
    scene.seed = seed;
    const int count = 20 + static_cast<int>(rng() % 41);
    for (int i = 0; i < count; ++i) {
        const bool sphere = (rng() & 1U) == 0U;
        const Vec3 center(uniform(rng, -0.8, 0.8), uniform(rng, -0.8, 0.8), uniform(rng, -0.8, 0.8));
        if (sphere) {
            Sphere s;
            s.center = center;
            s.radius = uniform(rng, 0.05, 0.2);
            s.albedo = random_albedo(rng);
            scene.spheres.push_back(s);
        } else {
            Triangle t;
            const auto corner = [&] {
                return Vec3(center.x() + uniform(rng, -0.2, 0.2), center.y() + uniform(rng, -0.2, 0.2),
                            center.z() + uniform(rng, -0.2, 0.2));
            };
            t.v0 = corner();
            t.v1 = corner();
            t.v2 = corner();
            t.albedo = random_albedo(rng);
            scene.triangles.push_back(t);
        }
    }
    return scene;
}

Hit cast_ray(const SyntheticScene& scene, const Vec3& origin, const Vec3& direction) {
    Hit best;
    best.distance = std::numeric_limits<double>::infinity();
    int index = 0;
    for (const auto& s : scene.spheres) {
        const double t = hit_sphere(s, origin, direction);
        if (t > 0.0 && t < best.distance) {
            best.distance = t;
            best.primitive = index;
        }
        ++index;
    }
    for (const auto& tri : scene.triangles) {
        const double t = hit_triangle(tri, origin, direction);
        if (t > 0.0 && t < best.distance) {
            best.distance = t;
            best.primitive = index;
        }
        ++index;
    }
    if (best.valid()) best.point = origin + best.distance * direction;
    return best;
}

PatchId patch_of(const SyntheticScene& scene, const Hit& hit) {
    if (!hit.valid()) return kBackgroundPatch;
    const double c = scene.cell_size;
    return (static_cast<std::uint64_t>(hit.primitive) << 48) | (cell_coord(hit.point.x(), c) << 32) |
           (cell_coord(hit.point.y(), c) << 16) | cell_coord(hit.point.z(), c);
}

Vec3 patch_cell_center(const SyntheticScene& scene, PatchId patch) {
    const auto coord = [&](int shift) {
        const auto biased = static_cast<std::int64_t>((patch >> shift) & 0xffffU);
        return (static_cast<double>(biased - kCellBias) + 0.5) * scene.cell_size;
    };
    return {coord(32), coord(16), coord(0)};
}

std::vector<PatchId> patch_map(const SyntheticScene& scene, const Camera& camera) {
    const auto& k = camera.intrinsics;
    std::vector<PatchId> out(static_cast<std::size_t>(k.width) * static_cast<std::size_t>(k.height));
    const Vec3 origin = camera.pose.position();
    std::size_t at = 0;
    for (int row = 0; row < k.height; ++row) {
        for (int col = 0; col < k.width; ++col) {
            const Vec3 dir = camera.pixel_direction(col + 0.5, row + 0.5);
            out[at++] = patch_of(scene, cast_ray(scene, origin, dir));
        }
    }
    return out;
}

Frame render_ground_truth(const SyntheticScene& scene, const Camera& camera) {
    const auto& k = camera.intrinsics;
    Frame frame(k.width, k.height);
    const Vec3 origin = camera.pose.position();
    for (int row = 0; row < k.height; ++row) {
        for (int col = 0; col < k.width; ++col) {
            const Hit hit = cast_ray(scene, origin, camera.pixel_direction(col + 0.5, row + 0.5));
            if (hit.valid()) frame.set_pixel(row, col, albedo_of(scene, hit.primitive));
        }
    }
    return frame;
}

std::vector<bool> visibility_mask(const SyntheticScene& scene, const Camera& target,
                                  std::span<const Camera> conditioning) {
    std::unordered_set<PatchId> seen;
    for (const auto& cam : conditioning)
        for (PatchId p : patch_map(scene, cam))
            if (p != kBackgroundPatch) seen.insert(p);
    const auto patches = patch_map(scene, target);
    std::vector<bool> mask(patches.size());
    for (std::size_t i = 0; i < patches.size(); ++i)
        mask[i] = patches[i] != kBackgroundPatch && seen.contains(patches[i]);
    return mask;
}

MatchSet oracle_correspondences(const SyntheticScene& scene, const Camera& a, const Camera& b,
                                std::size_t max_matches) {
    MatchSet out;
    if (max_matches == 0) return out;
    const auto& ka = a.intrinsics;
    const auto& kb = b.intrinsics;
    const double pixels = static_cast<double>(ka.width) * ka.height;
    const int step = std::max(1, static_cast<int>(std::sqrt(pixels / static_cast<double>(max_matches))));
    for (int row = 0; row < ka.height && out.size() < max_matches; row += step) {
        for (int col = 0; col < ka.width && out.size() < max_matches; col += step) {
            const Vec2 pa(col + 0.5, row + 0.5);
            const Hit hit = cast_ray(scene, a.pose.position(), a.pixel_direction(pa.x(), pa.y()));
            if (!hit.valid()) continue;
            double depth = 0.0;
            const Vec2 pb = b.project(hit.point, &depth);
            if (!(depth > 1e-9) || pb.x() < 0.0 || pb.y() < 0.0 || pb.x() >= kb.width || pb.y() >= kb.height)
                continue;
            const Vec3 to_point = hit.point - b.pose.position();
            const Hit back = cast_ray(scene, b.pose.position(), to_point.normalized());
            if (!back.valid() || (back.point - hit.point).norm() > 1e-6 * std::max(1.0, to_point.norm()))
                continue;
            out.push_back({pa, pb});
        }
    }
    return out;
}

Rgb hallucination_color(std::uint64_t scene_seed, PatchId patch, std::uint64_t pin_hash,
                        std::int64_t request_seed) {
    std::uint64_t h = splitmix(scene_seed);
    h = splitmix(h ^ patch);
    h = splitmix(h ^ pin_hash);
    h = splitmix(h ^ static_cast<std::uint64_t>(request_seed));
    return {static_cast<std::uint8_t>(h >> 40), static_cast<std::uint8_t>(h >> 32),
            static_cast<std::uint8_t>(h >> 24)};
}

int pinning_slot(std::span<const Camera> cameras, const Vec3& point) {
    int best = -1;
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cameras.size(); ++i) {
        const double d = (cameras[i].pose.position() - point).norm();
        if (d < best_distance) {
            best = static_cast<int>(i);
            best_distance = d;
        }
    }
    return best;
}

GenerationOutput oracle_generate(const SyntheticScene& scene, const GenerationRequest& request) {
    if (request.conditioning.empty()) throw Error(ErrorKind::invalid_argument, "empty conditioning");

    // Patch -> color shown by each conditioning frame (first pixel in raster
    // order). Slots repeating an earlier camera and frame share its table.
    const std::size_t slots = request.conditioning.size();
    std::vector<std::unordered_map<PatchId, Rgb>> tables;
    std::vector<std::size_t> table_of(slots);
    std::vector<Camera> cameras;
    cameras.reserve(slots);
    for (std::size_t s = 0; s < slots; ++s) {
        const auto& cond = request.conditioning[s];
        if (!cond.camera.is_valid()) throw Error(ErrorKind::invalid_argument, "invalid conditioning camera");
        check_frame_matches(cond.frame, cond.camera.intrinsics);
        cameras.push_back(cond.camera);
        bool shared = false;
        for (std::size_t e = 0; e < s && !shared; ++e) {
            const auto& earlier = request.conditioning[e];
            if (earlier.content_hash == cond.content_hash && earlier.camera == cond.camera &&
                earlier.frame == cond.frame) {
                table_of[s] = table_of[e];
                shared = true;
            }
        }
        if (shared) continue;
        std::unordered_map<PatchId, Rgb> table;
        const auto patches = patch_map(scene, cond.camera);
        for (std::size_t i = 0; i < patches.size(); ++i) {
            if (patches[i] == kBackgroundPatch) continue;
            const std::size_t at = i * 3;
            table.try_emplace(patches[i], Rgb{cond.frame.rgb[at], cond.frame.rgb[at + 1], cond.frame.rgb[at + 2]});
        }
        table_of[s] = tables.size();
        tables.push_back(std::move(table));
    }

    std::unordered_map<PatchId, PatchTrace> decided;
    const auto decide = [&](PatchId patch) -> const PatchTrace& {
        auto found = decided.find(patch);
        if (found != decided.end()) return found->second;
        const Vec3 center = patch_cell_center(scene, patch);
        PatchTrace trace;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < slots; ++s) {
            const auto& table = tables[table_of[s]];
            const auto it = table.find(patch);
            if (it == table.end()) continue;
            const double d = (cameras[s].pose.position() - center).norm();
            if (d < best) {
                best = d;
                trace.slot = static_cast<int>(s);
                trace.rgb = it->second;
            }
        }
        if (trace.slot < 0) {
            trace.kind = PatchTrace::Kind::hallucinated;
            trace.slot = pinning_slot(cameras, center);
            trace.rgb = hallucination_color(scene.seed, patch,
                                            request.conditioning[static_cast<std::size_t>(trace.slot)].content_hash,
                                            request.seed);
        }
        return decided.emplace(patch, trace).first->second;
    };

    GenerationOutput out;
    out.frames.reserve(request.targets.size());
    out.traces.reserve(request.targets.size());
    for (const auto& target : request.targets) {
        if (!target.is_valid()) throw Error(ErrorKind::invalid_argument, "invalid target camera");
        const auto patches = patch_map(scene, target);
        Frame frame(target.intrinsics.width, target.intrinsics.height);
        FrameTrace trace;
        for (std::size_t i = 0; i < patches.size(); ++i) {
            if (patches[i] == kBackgroundPatch) continue;
            const PatchTrace& t = decide(patches[i]);
            std::copy(t.rgb.begin(), t.rgb.end(), frame.rgb.begin() + static_cast<long>(i * 3));
            trace.emplace(patches[i], t);
        }
        out.frames.push_back(std::move(frame));
        out.traces.push_back(std::move(trace));
    }
    return out;
}

}  // namespace vcam
