#pragma once

#include <stdexcept>
#include <string>

#include "stablenorm/periodic_space.hpp"

namespace sn {

// Malformed input; what() starts with "line N: ".
struct ParseError : std::runtime_error {
  int line;
  ParseError(int line, const std::string& msg);
};

// Text format, one record per line ('#' starts a comment line):
//   stablenorm-space 1
//   rank <b> dim <n> vertices <V> edges <E> basepoint <p>
//   meta <key> <value>          (any number, value without spaces)
//   v <x_1> ... <x_n>            (V lines)
//   e <u> <v> <length> <l_1> ... <l_b>   (E lines, forward edge of each pair)
//   end
// Reals are written with 17 significant digits so a round trip is exact.
std::string serialize_space(const PeriodicSpace& s);
PeriodicSpace parse_space(const std::string& text);

//   stablenorm-ledger 1
//   rank <b>
//   diam|J|K|D|k_radius <real>
//   k_points <int>
//   k_certified 0|1
//   end
// Parsing rejects a D that differs from the value reassembled from diam and K.
std::string serialize_ledger(const ConstantsLedger& l, int rank);
ConstantsLedger parse_ledger(const std::string& text, int* rank = nullptr);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace sn
