#pragma once

// Channel specification files.
//
// Flat `key = value` lines; `#` starts a comment. Values are words
// (`family = dephasing`), numbers, complex numbers written `a`, `a+bi`,
// `bi` or `i`, bracketed lists (`[1, 0]`) and lists of lists for matrices
// (rows). Domains are products of intervals: `[0, 1] x [0, 1]`.
//
//   name          free text label
//   family        built-in family name
//   theta_domain  one interval per parameter
//   input_state   amplitude list (Kraus families only)
//   axis          x, y or z (rotation)
//   f, g          [c0, c1, c2] affine coefficients (example2)
//   dim, params, p0, slope1.., basis, generator1..  (custom-spectral)

#include <optional>
#include <string>
#include <string_view>

#include "qfi/channels.hpp"

namespace qfi {

struct ChannelSpec {
  std::string name;
  std::string family;
  FamilyOptions options;
  std::optional<Domain> domain;
  std::optional<ComplexVector> input;
};

/// Throws ValidationError with "line L, column C:" for syntax errors.
ChannelSpec parse_channel_spec(std::string_view text);
ChannelSpec load_channel_spec(const std::string& path);

/// Builds the channel and checks its invariants at the domain probe points.
ParametricChannel build_channel(const ChannelSpec& spec);

/// Text form that parses back to an identical spec.
std::string format_channel_spec(const ChannelSpec& spec);

/// Complex number parsing shared with the CLI ("a", "a+bi", "bi", "-i").
std::optional<Complex> parse_complex(std::string_view text);

}  // namespace qfi
