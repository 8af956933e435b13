#pragma once

#include <string>

#include "vcam/renderer.hpp"
#include "vcam/workbench/formats.hpp"

namespace vcam::workbench {

// Wire format of the generation contract. Frames travel as
// {width, height, png: base64}; content hashes as 16 hex digits.
Json frame_to_json(const Frame& frame);
Frame frame_from_json(const Json& j, const std::string& path = "frame");
Json to_json(const GenerationRequest& request);
GenerationRequest generation_request_from_json(const Json& j);
/// Frames only; traces do not cross the wire.
Json to_json(const GenerationOutput& output);
GenerationOutput generation_output_from_json(const Json& j);

/// Posts each request to `<base_url>/api/generate`.
class HttpBackend final : public GenerativeRenderer {
public:
    /// `base_url` like "http://127.0.0.1:8080".
    explicit HttpBackend(std::string base_url, int timeout_seconds = 300);

    GenerationOutput generate(const GenerationRequest& request) override;

private:
    std::string base_url_;
    int timeout_seconds_;
};

}  // namespace vcam::workbench
