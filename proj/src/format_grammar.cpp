#include "arm_alp/format_grammar.hpp"

#include <array>
#include <cctype>
#include <stdexcept>
#include <vector>

#include "arm_alp/errors.hpp"

namespace arm_alp {

namespace {

enum class Tag { Cot, LongCot, Code, Observation, Answer };

struct TagSpec {
  Tag tag;
  std::string_view open;
  std::string_view close;
};

constexpr std::array<TagSpec, 5> kTags = {{
    {Tag::Cot, "<COT>", "</COT>"},
    {Tag::LongCot, "<LONG_COT>", "</LONG_COT>"},
    {Tag::Code, "<CODE>", "</CODE>"},
    {Tag::Observation, "<OBSERVATION>", "</OBSERVATION>"},
    {Tag::Answer, "<ANSWER>", "</ANSWER>"},
}};

struct Block {
  Tag tag;
  std::string_view body;
};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Scans blocks left to right. Returns nullopt if a recognized tag is opened
// but never closed.
std::optional<std::vector<Block>> scan_blocks(std::string_view raw) {
  std::vector<Block> blocks;
  std::size_t pos = 0;
  while (pos < raw.size()) {
    const TagSpec* next = nullptr;
    std::size_t next_at = std::string_view::npos;
    for (const auto& spec : kTags) {
      const std::size_t at = raw.find(spec.open, pos);
      if (at < next_at) {
        next_at = at;
        next = &spec;
      }
    }
    if (next == nullptr) break;
    const std::size_t body_begin = next_at + next->open.size();
    const std::size_t close_at = raw.find(next->close, body_begin);
    if (close_at == std::string_view::npos) return std::nullopt;
    blocks.push_back({next->tag, raw.substr(body_begin, close_at - body_begin)});
    pos = close_at + next->close.size();
  }
  return blocks;
}

}  // namespace

std::size_t word_count(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (char c : text) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

ParsedResponse parse_response(std::string_view raw, const Tokenizer& tokenizer) {
  ParsedResponse out;
  out.token_length = tokenizer(raw);

  const auto blocks = scan_blocks(raw);
  if (!blocks) return out;

  const Block* last_answer = nullptr;
  const Block* cot = nullptr;
  const Block* long_cot = nullptr;
  const Block* code = nullptr;
  const Block* observation = nullptr;
  for (const auto& b : *blocks) {
    switch (b.tag) {
      case Tag::Answer: last_answer = &b; break;
      case Tag::Cot: if (!cot) cot = &b; break;
      case Tag::LongCot: if (!long_cot) long_cot = &b; break;
      case Tag::Code: if (!code) code = &b; break;
      case Tag::Observation: if (!observation) observation = &b; break;
    }
  }
  if (last_answer == nullptr) return out;
  const std::string_view answer = trim(last_answer->body);
  if (answer.empty()) return out;

  out.answer = std::string(answer);
  if (observation) out.observation = std::string(trim(observation->body));

  if (long_cot) {
    out.format = ReasoningFormat::LongCoT;
    out.rationale = std::string(trim(long_cot->body));
  } else if (code) {
    out.format = ReasoningFormat::CodeText;
    out.code_block = std::string(trim(code->body));
    if (cot) out.rationale = std::string(trim(cot->body));
    try {
      out.call_line = split_code_block(*out.code_block).call_line;
    } catch (const MissingCallLine&) {
      out.call_line.clear();
    }
  } else if (cot) {
    out.format = ReasoningFormat::ShortCoT;
    out.rationale = std::string(trim(cot->body));
  } else {
    out.format = ReasoningFormat::DirectAnswer;
  }
  return out;
}

CodeSplit split_code_block(std::string_view code_block) {
  // Locate the start of the last line whose first non-blank chars are ">>>".
  std::size_t call_start = std::string_view::npos;
  std::size_t line_start = 0;
  while (line_start <= code_block.size()) {
    std::size_t line_end = code_block.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = code_block.size();
    std::string_view line = code_block.substr(line_start, line_end - line_start);
    std::size_t lead = 0;
    while (lead < line.size() && (line[lead] == ' ' || line[lead] == '\t')) ++lead;
    if (line.substr(lead).starts_with(">>>")) call_start = line_start;
    if (line_end == code_block.size()) break;
    line_start = line_end + 1;
  }
  if (call_start == std::string_view::npos) {
    throw MissingCallLine("code block has no '>>>' call line");
  }

  std::size_t call_end = code_block.find('\n', call_start);
  if (call_end == std::string_view::npos) call_end = code_block.size();
  std::string_view call = trim(code_block.substr(call_start, call_end - call_start));
  call.remove_prefix(3);
  call = trim(call);
  if (call.empty()) throw MissingCallLine("'>>>' line has no expression");

  std::string_view source = code_block.substr(0, call_start);
  while (!source.empty() && is_space(source.back())) source.remove_suffix(1);
  return {std::string(source), std::string(call)};
}

CodeSplit extract_code(const ParsedResponse& parsed) {
  if (!is_code_format(parsed.format) || !parsed.code_block) {
    throw std::invalid_argument("extract_code: response is not a code format");
  }
  return split_code_block(*parsed.code_block);
}

std::string serialize_response(const ParsedResponse& parsed) {
  auto block = [](std::string_view tag, std::string_view body) {
    std::string s;
    s.append("<").append(tag).append(">\n");
    s.append(body);
    s.append("\n</").append(tag).append(">\n");
    return s;
  };

  std::string out;
  switch (parsed.format) {
    case ReasoningFormat::Malformed:
      return out;
    case ReasoningFormat::DirectAnswer:
      break;
    case ReasoningFormat::ShortCoT:
      out += block("COT", parsed.rationale);
      break;
    case ReasoningFormat::LongCoT:
      out += block("LONG_COT", parsed.rationale);
      break;
    case ReasoningFormat::CodeText:
    case ReasoningFormat::CodeExec:
      if (!parsed.rationale.empty()) out += block("COT", parsed.rationale);
      out += block("CODE", parsed.code_block.value_or(""));
      if (parsed.observation) out += block("OBSERVATION", *parsed.observation);
      break;
  }
  if (parsed.format != ReasoningFormat::CodeText &&
      parsed.format != ReasoningFormat::CodeExec && parsed.observation) {
    out += block("OBSERVATION", *parsed.observation);
  }
  out += block("ANSWER", parsed.answer);
  return out;
}

}  // namespace arm_alp
