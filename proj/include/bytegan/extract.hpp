/*
 Copyright 2026 The bytegan Authors.
 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bytegan/common.hpp"

namespace bytegan {

enum class NibbleOrigin : std::uint8_t { byte_sequence, opcode };

/// Sequence of 4-bit symbols, one per hexadecimal character of the source.
struct NibbleStream {
  std::vector<std::uint8_t> symbols;
  NibbleOrigin origin = NibbleOrigin::byte_sequence;
  std::string source_id;

  std::size_t size() const { return symbols.size(); }
  bool empty() const { return symbols.empty(); }
};

struct OpcodeStream {
  std::vector<std::string> mnemonics;
  std::string source_id;
  std::size_t skipped_lines = 0;
};

class DisassemblerUnavailable : public Error {
 public:
  explicit DisassemblerUnavailable(const std::string& detail)
      : Error("disassembler unavailable: " + detail) {}
};

/// How to run an external disassembler. `command` is a shell template where
/// `{file}` is replaced by the quoted input path; each output line is split on
/// `separator` and the first whitespace token of field `column` is the mnemonic.
struct DisassemblerAdapter {
  std::string command = "objdump -d {file}";
  std::size_t column = 2;
  char separator = '\t';
};

/// Mnemonic -> nibble table; anything not listed maps to kOverflow.
struct OpcodeAlphabet {
  static constexpr std::uint8_t kOverflow = 15;
  std::map<std::string, std::uint8_t> codes;
};

/// High nibble first, then low nibble, for each byte.
NibbleStream bytes_to_nibbles(std::span<const std::uint8_t> data, std::string source_id = {});

/// Inverse of bytes_to_nibbles; the stream length must be even.
std::vector<std::uint8_t> nibbles_to_bytes(std::span<const std::uint8_t> symbols);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

OpcodeStream extract_opcodes(const std::filesystem::path& path,
                             const DisassemblerAdapter& adapter = {});

/// Parses disassembler text output; split out so it can be tested without a subprocess.
OpcodeStream parse_disassembly(const std::string& text, const DisassemblerAdapter& adapter);

/// Ranks mnemonics by frequency (ties broken alphabetically); the top 15 get codes 0..14.
OpcodeAlphabet build_opcode_alphabet(std::span<const OpcodeStream> corpus);

NibbleStream opcodes_to_nibbles(const OpcodeStream& ops, const OpcodeAlphabet& alphabet);

}  // namespace bytegan
