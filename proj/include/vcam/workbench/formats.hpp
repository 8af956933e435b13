#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "vcam/geometry.hpp"
#include "vcam/metrics.hpp"
#include "vcam/planner.hpp"
#include "vcam/trajectory.hpp"

namespace vcam::workbench {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;
inline constexpr std::string_view kConvention = "camera_to_world;x_right;y_down;z_forward;row_major";

enum class FrameRole { input, target };

struct TrajectoryFrame {
    Camera camera;
    FrameRole role = FrameRole::target;

    bool operator==(const TrajectoryFrame&) const = default;
};

struct TrajectoryFile {
    int version = kFormatVersion;
    Task task = Task::trajectory;
    std::vector<TrajectoryFrame> frames;

    static TrajectoryFile from_cameras(const std::vector<Camera>& inputs, const std::vector<Camera>& targets,
                                       Task task = Task::trajectory);
    std::vector<Camera> cameras(FrameRole role) const;
    /// Inputs and targets as a planner request; set tasks are unordered.
    ViewRequest to_request() const;

    bool operator==(const TrajectoryFile&) const = default;
};

struct SceneEntry {
    std::string name;
    std::string trajectory_file;
    std::optional<std::string> reference_dir;
    std::vector<std::string> split_tags;

    bool operator==(const SceneEntry&) const = default;
};

struct SceneManifest {
    std::vector<SceneEntry> scenes;

    bool operator==(const SceneManifest&) const = default;
};

// Every parser throws Error(parse_error) naming the offending field path,
// e.g. "frames[3].pose: bottom row must be (0, 0, 0, 1)".

Json to_json(const Intrinsics& intrinsics);
Intrinsics intrinsics_from_json(const Json& j, const std::string& path = "intrinsics");

Json to_json(const Camera& camera);
Camera camera_from_json(const Json& j, const std::string& path = "camera");

Json to_json(const TrajectoryFile& file);
TrajectoryFile trajectory_file_from_json(const Json& j);

Json to_json(const PlannerConfig& config);
/// Missing keys keep the value from `base`.
PlannerConfig planner_config_from_json(const Json& j, const std::string& path = "config",
                                       const PlannerConfig& base = {});

Json to_json(const SamplingPlan& plan);
SamplingPlan plan_from_json(const Json& j);

Json to_json(const SceneManifest& manifest);
SceneManifest manifest_from_json(const Json& j);

/// Infinite PSNR is written as the string "inf"; neural metrics as null.
Json to_json(const MetricReport& report);
MetricReport metric_report_from_json(const Json& j);

/// Pretty-printed with a trailing newline; stable for byte comparisons.
std::string dump(const Json& j);
Json parse_json(std::string_view text);
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

std::string hex64(std::uint64_t value);
std::uint64_t parse_hex64(const std::string& text, const std::string& path);

}  // namespace vcam::workbench
