#pragma once

#include <string>
#include <string_view>

#include "hjb/control_problem.hpp"

namespace hjb {

/// Builds a problem from line-oriented `key = expression` text; `#` starts a
/// comment. Keys:
///
///   name                      optional label
///   dim                       1 or 2
///   noise                     P >= 1
///   x_min x_max [y_min y_max] box, numeric expressions
///   a_min a_max               control interval
///   sigma_ik                  entry (i, k) of sigma, 1-based, default 0
///   b_i                       drift component, default 0
///   c f dirichlet             required
///   exact                     optional closed-form solution
///
/// Coefficients are expressions in x, y, a (see Expression). Throws
/// ErrorCode::parse_error on unknown, duplicate or missing keys.
ControlProblem parse_problem_config(std::string_view text, const std::string& default_name = "custom");

/// Reads and parses a config file; the default name is the file stem.
ControlProblem load_problem_config(const std::string& path);

}  // namespace hjb
