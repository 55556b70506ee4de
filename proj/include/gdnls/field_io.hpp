#pragma once

#include <iosfwd>
#include <string>

#include "gdnls/grid.hpp"

namespace gdnls {

/// Field CSV format: header "x,re,im", one row per node, nodes ascending.
/// Readers validate uniform spacing to 1e-12 relative and a power-of-two
/// row count.
void write_field_csv(std::ostream& os, const ComplexField& f);
void write_field_csv(const std::string& path, const ComplexField& f);

ComplexField read_field_csv(std::istream& is);
ComplexField read_field_csv(const std::string& path);

}  // namespace gdnls
