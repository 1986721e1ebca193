#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "arm_alp/reasoning_format.hpp"

namespace arm_alp {

// Counts tokens in a piece of text. The default counts maximal runs of
// non-whitespace characters.
using Tokenizer = std::function<std::size_t(std::string_view)>;

std::size_t word_count(std::string_view text);

struct ParsedResponse {
  ReasoningFormat format = ReasoningFormat::Malformed;
  std::string rationale;                  // COT / LONG_COT body, trimmed
  std::optional<std::string> code_block;  // set iff format is a code format
  std::string call_line;                  // expression after ">>>", if any
  std::string answer;                     // trimmed body of the last ANSWER
  std::optional<std::string> observation;
  std::size_t token_length = 0;

  friend bool operator==(const ParsedResponse&,
                         const ParsedResponse&) = default;
};

// Classifies a tagged response. Never throws; unparseable input yields
// format == Malformed with an empty answer.
//
//   <LONG_COT> present          -> LongCoT
//   else <CODE> present         -> CodeText (CodeExec only after execution)
//   else <COT> present          -> ShortCoT
//   else                        -> DirectAnswer
//
// Any recognized tag opened without its closing tag, or a missing/empty
// ANSWER block, makes the response Malformed.
ParsedResponse parse_response(std::string_view raw,
                              const Tokenizer& tokenizer = word_count);

struct CodeSplit {
  std::string function_source;
  std::string call_line;
};

// Splits a code block at its final line beginning with ">>>".
// Throws MissingCallLine when no such line (or an empty call) exists and
// std::invalid_argument when `parsed` is not a code response.
CodeSplit extract_code(const ParsedResponse& parsed);
CodeSplit split_code_block(std::string_view code_block);

// Canonical tagged text for a parsed response. parse_response of the result
// reproduces `parsed` for every non-Malformed format when token_length was
// computed with the same tokenizer.
std::string serialize_response(const ParsedResponse& parsed);

}  // namespace arm_alp
