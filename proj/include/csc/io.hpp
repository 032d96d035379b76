//
// File formats: the self-describing "CSC1" binary container for signals,
// dictionaries and sparse codes, and a plain CSV representation of signals.
//
// CSC1 layout: 4-byte magic "CSC1", one record-kind byte (signal=1,
// dictionary=2, code=3), little-endian u64 dims (T,P | K,W,P | K,L), then
// row-major IEEE-754 doubles, little-endian.
//
#pragma once

#include <iosfwd>
#include <string>

#include "csc/signal.hpp"

namespace csc {

enum class RecordKind : uint8_t { signal = 1, dictionary = 2, code = 3 };

void write_csc1(std::ostream &out, const Signal &x);
void write_csc1(std::ostream &out, const Dictionary &dict);
void write_csc1(std::ostream &out, const SparseCode &code);

void save_csc1(const std::string &path, const Signal &x);
void save_csc1(const std::string &path, const Dictionary &dict);
void save_csc1(const std::string &path, const SparseCode &code);

// Peeks the record kind without consuming the stream position.
RecordKind peek_csc1_kind(std::istream &in);

Signal read_csc1_signal(std::istream &in);
Dictionary read_csc1_dictionary(std::istream &in);
SparseCode read_csc1_code(std::istream &in);

Signal load_csc1_signal(const std::string &path);
Dictionary load_csc1_dictionary(const std::string &path);
SparseCode load_csc1_code(const std::string &path);

// CSV with header row "t,ch0,ch1,..." and one row per sample.
void write_signal_csv(std::ostream &out, const Signal &x);
Signal read_signal_csv(std::istream &in);

} // namespace csc
