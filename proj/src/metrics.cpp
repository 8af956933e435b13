#include "vcam/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include "vcam/error.hpp"

namespace vcam {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;

void check_same_size(const Frame& a, const Frame& b) {
    if (a.width != b.width || a.height != b.height || a.rgb.size() != b.rgb.size())
        throw Error(ErrorKind::invalid_argument, "frame dimensions differ");
    if (a.rgb.size() != static_cast<std::size_t>(a.width) * static_cast<std::size_t>(a.height) * 3)
        throw Error(ErrorKind::invalid_argument, "frame buffer does not match its dimensions");
}

std::array<double, kWindow * kWindow> gaussian_window() {
    std::array<double, kWindow> g{};
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double x = i - kWindow / 2;
        g[static_cast<std::size_t>(i)] = std::exp(-(x * x) / (2.0 * kSigma * kSigma));
        sum += g[static_cast<std::size_t>(i)];
    }
    std::array<double, kWindow * kWindow> w{};
    for (int r = 0; r < kWindow; ++r)
        for (int c = 0; c < kWindow; ++c)
            w[static_cast<std::size_t>(r * kWindow + c)] =
                g[static_cast<std::size_t>(r)] * g[static_cast<std::size_t>(c)] / (sum * sum);
    return w;
}

double color_difference(const Rgb& a, const Rgb& b) {
    double d = 0.0;
    for (int c = 0; c < 3; ++c) d += std::abs(static_cast<int>(a[static_cast<std::size_t>(c)]) - b[static_cast<std::size_t>(c)]);
    return d / 3.0;
}

class Accumulator {
public:
    void add(double v) {
        sum_ += v;
        max_ = std::max(max_, v);
        ++count_;
    }
    Disagreement done() const {
        Disagreement d;
        d.samples = count_;
        d.no_overlap = count_ == 0;
        d.mean = count_ == 0 ? 0.0 : sum_ / static_cast<double>(count_);
        d.max = max_;
        return d;
    }

private:
    double sum_ = 0.0;
    double max_ = 0.0;
    std::size_t count_ = 0;
};

bool hallucinated(const PatchOrigin& o) { return o.kind == PatchOrigin::Kind::hallucinated; }

// Anchor index a target frame stands for, or -1.
std::vector<int> anchor_of_target(const SamplingPlan& plan) {
    std::vector<int> out(plan.request.targets.size(), -1);
    for (std::size_t j = 0; j < plan.anchor_targets.size(); ++j)
        if (const auto& t = plan.anchor_targets[j]) out[static_cast<std::size_t>(*t)] = static_cast<int>(j);
    return out;
}

bool same_view(const Camera& a, const Camera& b, double tolerance) {
    return a.intrinsics == b.intrinsics &&
           descriptor_distance(camera_descriptor(a), camera_descriptor(b)) <= tolerance;
}

}  // namespace

double psnr(const Frame& a, const Frame& b) {
    check_same_size(a, b);
    if (a.rgb.empty()) throw Error(ErrorKind::invalid_argument, "empty frames");
    double sse = 0.0;
    for (std::size_t i = 0; i < a.rgb.size(); ++i) {
        const double d = static_cast<double>(a.rgb[i]) - static_cast<double>(b.rgb[i]);
        sse += d * d;
    }
    if (sse == 0.0) return std::numeric_limits<double>::infinity();
    const double mse = sse / static_cast<double>(a.rgb.size());
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double ssim(const Frame& a, const Frame& b) {
    check_same_size(a, b);
    if (a.width < kWindow || a.height < kWindow)
        throw Error(ErrorKind::invalid_argument, "SSIM needs images of at least 11x11");
    static const auto window = gaussian_window();
    const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double c2 = (0.03 * 255.0) * (0.03 * 255.0);
    const int rows = a.height - kWindow + 1;
    const int cols = a.width - kWindow + 1;

    double total = 0.0;
    for (int ch = 0; ch < 3; ++ch) {
        double channel_sum = 0.0;
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                double mu_a = 0.0, mu_b = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
                for (int wr = 0; wr < kWindow; ++wr) {
                    for (int wc = 0; wc < kWindow; ++wc) {
                        const double w = window[static_cast<std::size_t>(wr * kWindow + wc)];
                        const std::size_t at =
                            (static_cast<std::size_t>(r + wr) * static_cast<std::size_t>(a.width) +
                             static_cast<std::size_t>(c + wc)) * 3 + static_cast<std::size_t>(ch);
                        const double x = a.rgb[at];
                        const double y = b.rgb[at];
                        mu_a += w * x;
                        mu_b += w * y;
                        aa += w * (x * x);
                        bb += w * (y * y);
                        ab += w * (x * y);
                    }
                }
                const double var_a = aa - mu_a * mu_a;
                const double var_b = bb - mu_b * mu_b;
                const double cov = ab - mu_a * mu_b;
                channel_sum += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                               ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
            }
        }
        total += channel_sum / (static_cast<double>(rows) * cols);
    }
    return total / 3.0;
}

TsedResult tsed(std::span<const Frame> frames, std::span<const Camera> cameras,
                std::span<const MatchSet> correspondences) {
    if (frames.size() < 2) throw Error(ErrorKind::invalid_argument, "TSED needs at least two frames");
    if (cameras.size() != frames.size()) throw Error(ErrorKind::invalid_argument, "one camera per frame is required");
    if (correspondences.size() != frames.size() - 1)
        throw Error(ErrorKind::invalid_argument, "missing correspondences for an adjacent pair");
    TsedResult out;
    for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
        if (correspondences[i].empty())
            throw Error(ErrorKind::invalid_argument, "missing correspondences for pair " + std::to_string(i));
        const Mat3 f = fundamental_matrix(cameras[i], cameras[i + 1]);
        const SedResult sed = epipolar_sed(f, correspondences[i]);
        out.pair_means.push_back(sed.mean);
        out.pair_forward_means.push_back(sed.forward_mean);
    }
    for (std::size_t i = 0; i < out.pair_means.size(); ++i) {
        out.mean += out.pair_means[i];
        out.forward_mean += out.pair_forward_means[i];
    }
    out.mean /= static_cast<double>(out.pair_means.size());
    out.forward_mean /= static_cast<double>(out.pair_means.size());
    return out;
}

Disagreement cross_pass_disagreement(const ExecutionResult& result) {
    // patch -> (hallucinating pass -> color), first occurrence wins.
    std::map<PatchId, std::map<int, Rgb>> seen;
    for (const auto& trace : result.target_traces)
        for (const auto& [patch, origin] : trace)
            if (hallucinated(origin)) seen[patch].try_emplace(origin.pass, origin.rgb);

    Accumulator acc;
    for (const auto& [patch, by_pass] : seen) {
        if (by_pass.size() < 2) continue;
        double sum = 0.0;
        std::size_t pairs = 0;
        for (auto i = by_pass.begin(); i != by_pass.end(); ++i) {
            for (auto j = std::next(i); j != by_pass.end(); ++j) {
                sum += color_difference(i->second, j->second);
                ++pairs;
            }
        }
        acc.add(sum / static_cast<double>(pairs));
    }
    return acc.done();
}

AdjacentDisagreement adjacent_frame_disagreement(const ExecutionResult& result, const SamplingPlan& plan) {
    const auto anchor_of = anchor_of_target(plan);
    Accumulator all;
    Accumulator shared;
    AdjacentDisagreement out;
    for (std::size_t k = 0; k + 1 < result.target_traces.size(); ++k) {
        if (result.target_pass[k] == result.target_pass[k + 1]) continue;
        ++out.pairs;
        const auto& first = result.target_traces[k];
        const auto& second = result.target_traces[k + 1];
        // Anchor a frame's patch was taken from: itself when it is an anchor,
        // otherwise the anchor it copied from.
        const auto pinned = [&](std::size_t frame, const PatchOrigin& o) {
            return anchor_of[frame] >= 0 ? anchor_of[frame] : o.direct_anchor;
        };
        for (const auto& [patch, a] : first) {
            const auto it = second.find(patch);
            if (it == second.end()) continue;
            const PatchOrigin& b = it->second;
            const double diff = color_difference(a.rgb, b.rgb);
            if (hallucinated(a) || hallucinated(b)) all.add(diff);
            const int pa = pinned(k, a);
            if (pa >= 0 && pa == pinned(k + 1, b)) shared.add(diff);
        }
    }
    out.all = all.done();
    out.shared_anchor = shared.done();
    return out;
}

Disagreement revisit_disagreement(const ExecutionResult& result, const SamplingPlan& plan,
                                  const RevisitOptions& options) {
    struct View {
        const Camera* camera;
        const ResolvedTrace* trace;
        int pass;
    };
    std::vector<View> views;
    if (options.anchors_only) {
        for (std::size_t j = 0; j < result.anchor_traces.size(); ++j)
            views.push_back({&plan.anchor_cameras[j], &result.anchor_traces[j], result.anchor_pass[j]});
    } else {
        for (std::size_t k = 0; k < result.target_traces.size(); ++k)
            views.push_back({&plan.request.targets[k], &result.target_traces[k], result.target_pass[k]});
    }

    // Copied from an anchor that an earlier pass put in the bank.
    const auto bank_pinned = [&](const PatchOrigin& o, int pass) {
        return o.direct_anchor >= 0 && result.anchor_pass[static_cast<std::size_t>(o.direct_anchor)] != pass;
    };

    Accumulator acc;
    for (std::size_t i = 0; i < views.size(); ++i) {
        for (std::size_t j = i + 1; j < views.size(); ++j) {
            if (views[i].pass == views[j].pass) continue;
            if (!same_view(*views[i].camera, *views[j].camera, options.camera_tolerance)) continue;
            const auto& earlier = *views[i].trace;
            const auto& later = *views[j].trace;
            for (const auto& [patch, b] : later) {
                const auto it = earlier.find(patch);
                if (it == earlier.end()) continue;
                const PatchOrigin& a = it->second;
                if (options.bank_pinned_only) {
                    if (!bank_pinned(a, views[i].pass) || !bank_pinned(b, views[j].pass)) continue;
                } else if (!hallucinated(a) && !hallucinated(b)) {
                    continue;
                }
                acc.add(color_difference(a.rgb, b.rgb));
            }
        }
    }
    return acc.done();
}

MetricReport evaluate_frames(std::span<const Frame> predicted, std::span<const Frame> reference) {
    if (predicted.size() != reference.size())
        throw Error(ErrorKind::invalid_argument, "predicted and reference frame counts differ");
    MetricReport report;
    if (predicted.empty()) return report;
    double psnr_sum = 0.0;
    double ssim_sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        report.psnr.push_back(psnr(predicted[i], reference[i]));
        report.ssim.push_back(ssim(predicted[i], reference[i]));
        psnr_sum += report.psnr.back();
        ssim_sum += report.ssim.back();
    }
    report.psnr_mean = psnr_sum / static_cast<double>(predicted.size());
    report.ssim_mean = ssim_sum / static_cast<double>(predicted.size());
    return report;
}

}  // namespace vcam
