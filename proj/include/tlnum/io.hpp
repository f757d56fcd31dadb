#pragma once

#include "tlnum/field.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace tln {

std::string base64_encode(const std::vector<unsigned char>& bytes);
std::vector<unsigned char> base64_decode(const std::string& text);

// Single JSON document: header {h, bbox, domain, arity, shape} plus base64
// blocks for the float64 values (row-major, little-endian) and the 0/1 mask.
nlohmann::json sampled_to_json(const SampledFunction& f);
SampledFunction sampled_from_json(const nlohmann::json& j);

void write_sampled(const std::string& path, const SampledFunction& f, const nlohmann::json& provenance = nullptr);
SampledFunction read_sampled(const std::string& path);

}
