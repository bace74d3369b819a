#pragma once

#include <string>

#include "moo/ast.hpp"

namespace moo {

/// Canonical formatter: 4-space indentation, one member per line, interfaces
/// before classes, driver last, one blank line between declarations.
/// `parse_unit(render_source(u)) == u` for every structurally valid unit.
std::string render_source(const SourceUnit& unit);

std::string render_class(const ClassDecl& c);
std::string render_interface(const InterfaceDecl& i);
std::string render_driver(const DriverBlock& d);
std::string render_expr(const Expr& e);
std::string render_type(const TypeExpr& t);

} // namespace moo
