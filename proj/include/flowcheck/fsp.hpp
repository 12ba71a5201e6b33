#pragma once

#include "flowcheck/encoder.hpp"
#include "flowcheck/fltl.hpp"

#include <span>
#include <string>

namespace flowcheck {

/// The LTS as a single FSP process, one local process per state:
///   NAME = S0,
///   S0 = (a -> S1 | b -> S2),
///   ...
///   Sn = (_terminate -> Sn).
std::string emit_fsp_model(const Lts& lts, const std::string& name);

/// `.flp` text: one `fluent` line per fluent, then one `assert` line per assertion.
std::string emit_fsp_fluents(std::span<const FluentDef> fluents, std::span<const Assertion> assertions);
std::string emit_fsp_fluents(const PropertySet& props);

/// Uppercase-initial process name derived from a spec or file name ("trip" -> "TRIP").
std::string fsp_process_name(std::string_view hint);

} // namespace flowcheck
