#pragma once

// JSON files for dense operators and RIP reports.
//
// Operator file layout:
//   {"shape": [m, N*n], "field": "real"|"complex", "blocks": [N, n],
//    "data": [...]}   column-major, complex entries as [re, im]

#include <filesystem>

#include <json.hpp>

#include "hics/himeasure.hpp"
#include "hics/rip.hpp"

namespace hics {

template <typename Scalar>
nlohmann::json dense_operator_to_json(const DenseOperator<Scalar>& op);

/// Reads a real or complex operator. Loading a complex file as real fails;
/// a real file loads as complex with zero imaginary parts.
template <typename Scalar>
DenseOperator<Scalar> dense_operator_from_json(const nlohmann::json& j);

Field operator_field(const nlohmann::json& j);

template <typename Scalar>
void save_dense_operator(const std::filesystem::path& path, const DenseOperator<Scalar>& op);

template <typename Scalar>
DenseOperator<Scalar> load_dense_operator(const std::filesystem::path& path);

nlohmann::json rip_report_to_json(const RipReport& report);
RipReport rip_report_from_json(const nlohmann::json& j);

/// Entries in order; complex values as [re, im].
template <typename Scalar>
nlohmann::json vector_to_json(const Vec<Scalar>& v);

/// {"block": [entries...], ...} with block indices as keys.
nlohmann::json support_to_json(const HiSupport& s);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace hics
