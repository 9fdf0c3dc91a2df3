// Persistence: PathField binary + CSV, model JSON descriptors, content hashes.
#pragma once

#include "klab/calculus.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace klab {

/// Little-endian binary layout: 8 magic bytes "KLABPF1\0", then two int64
/// dims (rows, cols), then rows*cols float64 values in row-major order.
void save_path_field(const PathField& field, const std::filesystem::path& file);

/// Loads the raw payload of a PathField file; the grid is reattached by the
/// caller (dims are checked against it).
Eigen::MatrixXd load_path_field_values(const std::filesystem::path& file);
PathField load_path_field(const PathGrid& grid, const std::filesystem::path& file);

/// CSV with header "t,x,value", one row per node, %.17g floats.
void export_path_field_csv(const PathField& field, const std::filesystem::path& file);

/// JSON descriptor of a model: kind, N_x, and L or psi0 samples. Rebuilding
/// from the descriptor reruns the constructor on identical inputs, so the
/// result is bit-stable.
nlohmann::ordered_json model_descriptor(const FiberModel& model);
FiberModel model_from_descriptor(const nlohmann::json& j);

/// FNV-1a 64-bit over a string; used for model/scenario identity checks.
std::uint64_t fnv1a64(const std::string& data);
std::string hash_hex(std::uint64_t h);
std::string model_hash(const FiberModel& model);

/// Serialize a double so it reparses to the same bits.
std::string double_repr(double v);

void write_text_file(const std::filesystem::path& file, const std::string& content);
std::string read_text_file(const std::filesystem::path& file);

} // namespace klab
