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

#include <gtest/gtest.h>

#include <fstream>

#include "bytegan/extract.hpp"
#include "temp_dir.hpp"

namespace bytegan {
namespace {

using testing_oracles::TempDir;

TEST(Nibbles, HighNibbleFirst) {
  const std::vector<std::uint8_t> data = {0x4D, 0x5A, 0x00, 0xFF};
  EXPECT_EQ(bytes_to_nibbles(data).symbols, (std::vector<std::uint8_t>{4, 13, 5, 10, 0, 0, 15, 15}));
  EXPECT_EQ(nibbles_to_bytes(bytes_to_nibbles(data).symbols), data);
  EXPECT_TRUE(bytes_to_nibbles({}).empty());
  const std::vector<std::uint8_t> odd = {1, 2, 3};
  EXPECT_THROW(nibbles_to_bytes(odd), Error);
}

TEST(Nibbles, SingleByteExamples) {
  const std::vector<std::uint8_t> zero = {0x00}, af = {0xAF}, two = {0x12, 0x3C};
  EXPECT_EQ(bytes_to_nibbles(zero).symbols, (std::vector<std::uint8_t>{0, 0}));
  EXPECT_EQ(bytes_to_nibbles(af).symbols, (std::vector<std::uint8_t>{10, 15}));
  EXPECT_EQ(bytes_to_nibbles(two).symbols, (std::vector<std::uint8_t>{1, 2, 3, 12}));
}

TEST(Nibbles, ReadsFiles) {
  TempDir dir;
  std::ofstream(dir / "f", std::ios::binary) << "MZ";
  EXPECT_EQ(read_file_bytes(dir / "f"), (std::vector<std::uint8_t>{'M', 'Z'}));
  EXPECT_THROW(read_file_bytes(dir / "missing"), Error);
}

TEST(Disassembly, ParsesObjdumpLines) {
  const std::string text =
      "\n"
      "a.out:     file format elf64-x86-64\n"
      "Disassembly of section .text:\n"
      "0000000000001000 <_start>:\n"
      "    1000:\t31 ed                \txor    %ebp,%ebp\n"
      "    1002:\t49 89 d1             \tmov    %rdx,%r9\n"
      "    1005:\t00 00                \t(bad)  \n"
      "    1007:\tc3                   \tret\n"
      "    1008:\t90                   \t\n";
  const auto ops = parse_disassembly(text, {});
  EXPECT_EQ(ops.mnemonics, (std::vector<std::string>{"xor", "mov", "ret"}));
  EXPECT_EQ(ops.skipped_lines, 6u);
}

TEST(Disassembly, AlphabetRanksByFrequencyThenName) {
  std::vector<OpcodeStream> corpus(2);
  // 16 distinct mnemonics; "m00" most frequent, "m15" least.
  for (int i = 0; i < 16; ++i) {
    const std::string name = (i < 10 ? "m0" : "m1") + std::to_string(i % 10);
    for (int r = 0; r < 20 - i; ++r) corpus[r % 2].mnemonics.push_back(name);
  }
  // "aaa" ties m14 at six uses and wins the last code alphabetically.
  corpus[0].mnemonics.push_back("aaa");
  for (int r = 0; r < 5; ++r) corpus[1].mnemonics.push_back("aaa");
  const auto alphabet = build_opcode_alphabet(corpus);
  ASSERT_EQ(alphabet.codes.size(), 15u);
  EXPECT_EQ(alphabet.codes.at("m00"), 0);
  EXPECT_EQ(alphabet.codes.at("m13"), 13);
  EXPECT_EQ(alphabet.codes.at("aaa"), 14);
  EXPECT_EQ(alphabet.codes.count("m14"), 0u);
  EXPECT_EQ(alphabet.codes.count("m15"), 0u);

  OpcodeStream ops;
  ops.mnemonics = {"m00", "m15", "aaa", "unseen"};
  EXPECT_EQ(opcodes_to_nibbles(ops, alphabet).symbols, (std::vector<std::uint8_t>{0, 15, 14, 15}));
  EXPECT_EQ(opcodes_to_nibbles(ops, alphabet).origin, NibbleOrigin::opcode);
}

TEST(Disassembly, OpcodeNibbleExamples) {
  OpcodeAlphabet alphabet;
  OpcodeStream ops;
  ops.mnemonics = {"xyzzy"};
  EXPECT_EQ(opcodes_to_nibbles(ops, alphabet).symbols, (std::vector<std::uint8_t>{15}));
  alphabet.codes = {{"mov", 1}, {"add", 2}, {"ret", 3}};
  ops.mnemonics = {"mov", "mov"};
  EXPECT_EQ(opcodes_to_nibbles(ops, alphabet).symbols, (std::vector<std::uint8_t>{1, 1}));
  ops.mnemonics = {"mov", "add", "ret"};
  EXPECT_EQ(opcodes_to_nibbles(ops, alphabet).symbols, (std::vector<std::uint8_t>{1, 2, 3}));
}

TEST(Disassembly, MissingToolIsReported) {
  TempDir dir;
  std::ofstream(dir / "f") << "x";
  DisassemblerAdapter adapter;
  adapter.command = "bytegan-no-such-disassembler {file}";
  EXPECT_THROW(extract_opcodes(dir / "f", adapter), DisassemblerUnavailable);
}

TEST(Disassembly, UnrecognizedFormatYieldsNoOpcodes) {
  if (std::system("command -v objdump > /dev/null 2>&1") != 0) GTEST_SKIP() << "objdump not installed";
  TempDir dir;
  std::ofstream(dir / "notes.txt") << "plain text, not an object file\n";
  const auto ops = extract_opcodes(dir / "notes.txt");
  EXPECT_TRUE(ops.mnemonics.empty());
}

}  // namespace
}  // namespace bytegan
