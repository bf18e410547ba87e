#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "qam/capacity.hpp"
#include "qam/qam_builder.hpp"
#include "qam/quantum_core.hpp"
#include "qam/table.hpp"
#include "qam/types.hpp"

namespace qam {

using Json = nlohmann::ordered_json;

// Complex numbers are [re, im]; matrices are row-major lists of rows.
Json to_json(Complex z);
Json to_json(const ComplexMatrix& m);
Json to_json(const ComplexVector& v);
Json to_json(const Rational& r);
Json to_json(const CptpReport& r);
Json to_json(const QamReport& r);
Json to_json(const CapacityReport& r);
Json to_json(const Table& t);

Complex complex_from_json(const Json& j);
ComplexMatrix matrix_from_json(const Json& j);
ComplexVector vector_from_json(const Json& j);

std::string to_csv(const Table& t);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace qam
