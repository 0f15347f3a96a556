#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace omni {

// Parsed HTML node. Element nodes carry a lowercase tag and attributes; text
// runs are nodes with an empty tag. The tree is lenient: mismatched close
// tags never fail, they just close what they can.
struct DomNode {
    std::string tag;  // empty for text runs
    std::vector<std::pair<std::string, std::string>> attributes;  // first occurrence wins
    std::vector<std::unique_ptr<DomNode>> children;
    std::string text;  // text runs only

    bool is_text() const { return tag.empty(); }
    bool is_element() const { return !tag.empty(); }
    const std::string* attribute(std::string_view name) const;
};

// Lenient tokenizing parser: comments and doctypes are discarded, script and
// style bodies are kept as raw text children (scoring skips them), void
// elements never nest, entities are decoded in text and attribute values.
std::unique_ptr<DomNode> parse_html(std::string_view html);

// Subtree statistics behind main-content selection.
struct NodeScore {
    int64_t text_chars = 0;       // non-whitespace chars outside script/style
    int64_t descendant_tags = 0;  // element nodes strictly below
    int64_t link_chars = 0;       // text chars under an <a> within the subtree
    double density = 0.0;         // text_chars / (1 + descendant_tags)
};

NodeScore score_node(const DomNode& node);

// Concatenated text of a subtree, skipping script/style. When normalize is
// set, whitespace runs collapse to single spaces and the ends are trimmed.
std::string subtree_text(const DomNode& node, bool normalize = true);

}  // namespace omni
