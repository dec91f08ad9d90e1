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

#include "bytegan/extract.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace bytegan {

NibbleStream bytes_to_nibbles(std::span<const std::uint8_t> data, std::string source_id) {
  NibbleStream out;
  out.origin = NibbleOrigin::byte_sequence;
  out.source_id = std::move(source_id);
  out.symbols.resize(data.size() * 2);
  std::uint8_t* dst = out.symbols.data();
  for (const std::uint8_t b : data) {
    *dst++ = b >> 4;
    *dst++ = b & 0x0F;
  }
  return out;
}

std::vector<std::uint8_t> nibbles_to_bytes(std::span<const std::uint8_t> symbols) {
  if (symbols.size() % 2 != 0) throw Error("odd-length nibble stream cannot be paired into bytes");
  std::vector<std::uint8_t> out(symbols.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>((symbols[2 * i] << 4) | (symbols[2 * i + 1] & 0x0F));
  }
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::streamoff>(in.tellg());
  if (size < 0) throw Error("cannot size " + path.string());
  in.seekg(0, std::ios::beg);
  std::vector<std::uint8_t> data(static_cast<std::size_t>(size));
  if (size > 0 && !in.read(reinterpret_cast<char*>(data.data()), size)) {
    throw Error("short read on " + path.string());
  }
  return data;
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (const char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += "'";
  return out;
}

std::string expand_template(const std::string& tmpl, const std::string& file) {
  std::string out;
  const std::string key = "{file}";
  std::size_t pos = 0;
  bool substituted = false;
  while (true) {
    const auto hit = tmpl.find(key, pos);
    if (hit == std::string::npos) break;
    out += tmpl.substr(pos, hit - pos);
    out += shell_quote(file);
    pos = hit + key.size();
    substituted = true;
  }
  out += tmpl.substr(pos);
  if (!substituted) out += " " + shell_quote(file);
  return out;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

OpcodeStream parse_disassembly(const std::string& text, const DisassemblerAdapter& adapter) {
  OpcodeStream out;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, adapter.separator)) fields.push_back(field);
    if (fields.size() <= adapter.column) {
      ++out.skipped_lines;
      continue;
    }
    std::istringstream tok(fields[adapter.column]);
    std::string mnemonic;
    if (!(tok >> mnemonic) || mnemonic.starts_with('(')) {
      ++out.skipped_lines;
      continue;
    }
    out.mnemonics.push_back(std::move(mnemonic));
  }
  return out;
}

OpcodeStream extract_opcodes(const std::filesystem::path& path, const DisassemblerAdapter& adapter) {
  char err_name[] = "/tmp/bytegan-disasm-XXXXXX";
  const int err_fd = ::mkstemp(err_name);
  if (err_fd < 0) throw Error("cannot create temporary file for disassembler stderr");
  ::close(err_fd);

  const std::string cmd = expand_template(adapter.command, path.string()) + " 2>" + err_name;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    std::filesystem::remove(err_name);
    throw DisassemblerUnavailable("cannot spawn '" + adapter.command + "'");
  }
  std::string output;
  std::array<char, 1 << 14> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) output.append(buf.data(), n);
  const int status = ::pclose(pipe);
  const std::string err_text = read_text(err_name);
  std::filesystem::remove(err_name);

  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (code != 0) {
    // Input the tool cannot decode at all has no instructions; anything else is a tool failure.
    if (code > 0 && code < 126 && err_text.find("file format not recognized") != std::string::npos) {
      OpcodeStream empty;
      empty.source_id = path.string();
      return empty;
    }
    throw DisassemblerUnavailable("'" + adapter.command + "' exited with status " +
                                  std::to_string(code));
  }
  OpcodeStream out = parse_disassembly(output, adapter);
  out.source_id = path.string();
  return out;
}

OpcodeAlphabet build_opcode_alphabet(std::span<const OpcodeStream> corpus) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& stream : corpus) {
    for (const auto& m : stream.mnemonics) ++counts[m];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  OpcodeAlphabet alphabet;
  for (std::size_t i = 0; i < ranked.size() && i < OpcodeAlphabet::kOverflow; ++i) {
    alphabet.codes.emplace(ranked[i].first, static_cast<std::uint8_t>(i));
  }
  return alphabet;
}

NibbleStream opcodes_to_nibbles(const OpcodeStream& ops, const OpcodeAlphabet& alphabet) {
  NibbleStream out;
  out.origin = NibbleOrigin::opcode;
  out.source_id = ops.source_id;
  out.symbols.reserve(ops.mnemonics.size());
  for (const auto& m : ops.mnemonics) {
    const auto it = alphabet.codes.find(m);
    const std::uint8_t code = it == alphabet.codes.end() ? OpcodeAlphabet::kOverflow : it->second;
    out.symbols.push_back(code > 15 ? OpcodeAlphabet::kOverflow : code);
  }
  return out;
}

}  // namespace bytegan
