#pragma once

#include <stdexcept>
#include <string>

#include "tvar/fdiv.hpp"

namespace tvar::io {

// Malformed JSON or a schema violation; the message names the offending field.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "inf", or a rational in the syntax of parse_rat.
fdiv::BasePoint parse_base_point(const std::string& text);

fdiv::FDivisor parse_fdivisor(const std::string& text);
fdiv::FDivisor read_fdivisor(const std::string& path);
std::string write_fdivisor(const fdiv::FDivisor& s);

// The divisor resolves cone references and fixes the expected vector lengths.
fdiv::SupportFunction parse_sf(const fdiv::FDivisor& s, const std::string& text);
fdiv::SupportFunction read_sf(const fdiv::FDivisor& s, const std::string& path);
std::string write_sf(const fdiv::SupportFunction& h);

bool fdivisor_equal(const fdiv::FDivisor& a, const fdiv::FDivisor& b);

}  // namespace tvar::io
