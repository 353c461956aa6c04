#pragma once

// Runs the lexicon and local grammars over documents and exports one
// itemset of typed mentions per document.

#include <cstddef>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "bsv/document.hpp"
#include "bsv/grammar.hpp"
#include "bsv/lexicon.hpp"
#include "bsv/mention.hpp"

namespace bsv {

/// Union of dictionary and grammar mentions over every block, sorted
/// canonically. For same-concept overlaps between the two sources the longer
/// span survives; equal lengths keep the dictionary mention.
DocItemset extract_document(const Document& doc, const Lexicon& lex, const std::vector<PatternRule>& rules);

struct LineError {
    std::size_t line = 0;  // 1-based line in the input stream
    std::string message;
};

struct CorpusRunStats {
    std::size_t documents = 0;  // successfully processed
    std::vector<LineError> errors;
};

/// Reads a JSONL corpus in batches and calls emit(itemset) in input order.
/// Malformed lines are recorded and skipped. jobs = 0 uses every core.
CorpusRunStats extract_corpus(std::istream& corpus, const Lexicon& lex, const std::vector<PatternRule>& rules,
                              const std::function<void(const DocItemset&)>& emit, unsigned jobs = 1,
                              std::size_t batch_size = 1024);

/// Writes one serialized itemset per line.
CorpusRunStats extract_corpus(std::istream& corpus, const Lexicon& lex, const std::vector<PatternRule>& rules,
                              std::ostream& out, unsigned jobs = 1);

/// Reads a JSONL stream line by line in batches of batch_size, handing
/// (line number, line) pairs to sink. Blank lines are skipped.
void for_each_line_batch(std::istream& in, std::size_t batch_size,
                         const std::function<void(std::vector<std::pair<std::size_t, std::string>>&)>& sink);

}  // namespace bsv
