#include "hics/operator_io.hpp"

#include <fstream>

namespace hics {

using nlohmann::json;

template <typename Scalar>
json dense_operator_to_json(const DenseOperator<Scalar>& op) {
  const auto& a = op.matrix();
  json data = json::array();
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if constexpr (is_complex_v<Scalar>) {
        data.push_back({a(i, j).real(), a(i, j).imag()});
      } else {
        data.push_back(a(i, j));
      }
    }
  }
  return json{{"shape", {a.rows(), a.cols()}},
              {"field", to_string(field_of<Scalar>())},
              {"blocks", {op.block_count(), op.block_len()}},
              {"data", std::move(data)}};
}

Field operator_field(const json& j) {
  const auto f = j.at("field").get<std::string>();
  if (f == "real") {
    return Field::real;
  }
  if (f == "complex") {
    return Field::complex;
  }
  throw ParameterError("operator file: unknown field '" + f + "'");
}

template <typename Scalar>
DenseOperator<Scalar> dense_operator_from_json(const json& j) {
  try {
    const auto shape = j.at("shape").get<std::vector<Index>>();
    const auto blocks = j.at("blocks").get<std::vector<Index>>();
    if (shape.size() != 2 || blocks.size() != 2) {
      throw DimensionError("operator file: shape and blocks must have two entries");
    }
    const Field field = operator_field(j);
    if (field == Field::complex && !is_complex_v<Scalar>) {
      throw ParameterError("operator file holds a complex operator, a real one was requested");
    }
    const auto& data = j.at("data");
    if (static_cast<Index>(data.size()) != shape[0] * shape[1]) {
      throw DimensionError("operator file: data length does not match shape");
    }
    Mat<Scalar> a(shape[0], shape[1]);
    std::size_t k = 0;
    for (Index c = 0; c < shape[1]; ++c) {
      for (Index r = 0; r < shape[0]; ++r, ++k) {
        const auto& v = data[k];
        if (field == Field::complex) {
          if constexpr (is_complex_v<Scalar>) {
            a(r, c) = Scalar(v.at(0).get<double>(), v.at(1).get<double>());
          }
        } else {
          a(r, c) = Scalar(v.get<double>());
        }
      }
    }
    return DenseOperator<Scalar>(std::move(a), blocks[0], blocks[1]);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("operator file: ") + e.what());
  }
}

template <typename Scalar>
json vector_to_json(const Vec<Scalar>& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) {
    if constexpr (is_complex_v<Scalar>) {
      out.push_back({v[i].real(), v[i].imag()});
    } else {
      out.push_back(v[i]);
    }
  }
  return out;
}

json support_to_json(const HiSupport& s) {
  json out = json::object();
  for (const auto& [block, entries] : s.entries) {
    out[std::to_string(block)] = entries;
  }
  return out;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParameterError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << j.dump(2) << '\n';
}

template <typename Scalar>
void save_dense_operator(const std::filesystem::path& path, const DenseOperator<Scalar>& op) {
  write_json_file(path, dense_operator_to_json(op));
}

template <typename Scalar>
DenseOperator<Scalar> load_dense_operator(const std::filesystem::path& path) {
  return dense_operator_from_json<Scalar>(read_json_file(path));
}

json rip_report_to_json(const RipReport& report) {
  json j{{"delta", report.delta},
         {"kind", to_string(report.kind)},
         {"supports_examined", report.supports_examined},
         {"flat", report.flat}};
  if (report.flat) {
    j["k"] = report.s;
  } else {
    j["s"] = report.s;
    j["sigma"] = report.sigma;
  }
  if (!report.variant.empty()) {
    j["variant"] = report.variant;
  }
  if (!report.constituents.empty()) {
    j["constituents"] = report.constituents;
  }
  return j;
}

RipReport rip_report_from_json(const json& j) {
  RipReport r;
  r.delta = j.at("delta").get<double>();
  const auto kind = j.at("kind").get<std::string>();
  bool known = false;
  for (RipKind k : {RipKind::exact, RipKind::monte_carlo_lower_bound, RipKind::coherence_upper_bound,
                    RipKind::inherited_upper_bound, RipKind::incoherent_blocks_upper_bound}) {
    if (kind == to_string(k)) {
      r.kind = k;
      known = true;
    }
  }
  if (!known) {
    throw ParameterError("unknown RIP report kind '" + kind + "'");
  }
  r.supports_examined = j.at("supports_examined").get<std::uint64_t>();
  r.flat = j.value("flat", false);
  if (r.flat) {
    r.s = j.at("k").get<Index>();
    r.sigma = 1;
  } else {
    r.s = j.at("s").get<Index>();
    r.sigma = j.at("sigma").get<Index>();
  }
  r.variant = j.value("variant", std::string());
  if (j.contains("constituents")) {
    r.constituents = j.at("constituents").get<std::map<std::string, double>>();
  }
  return r;
}

template json vector_to_json<double>(const Vec<double>&);
template json vector_to_json<cplx>(const Vec<cplx>&);
template json dense_operator_to_json<double>(const DenseOperator<double>&);
template json dense_operator_to_json<cplx>(const DenseOperator<cplx>&);
template DenseOperator<double> dense_operator_from_json<double>(const json&);
template DenseOperator<cplx> dense_operator_from_json<cplx>(const json&);
template void save_dense_operator<double>(const std::filesystem::path&, const DenseOperator<double>&);
template void save_dense_operator<cplx>(const std::filesystem::path&, const DenseOperator<cplx>&);
template DenseOperator<double> load_dense_operator<double>(const std::filesystem::path&);
template DenseOperator<cplx> load_dense_operator<cplx>(const std::filesystem::path&);

}  // namespace hics
