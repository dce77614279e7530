#include "pddlwb/sexpr.hpp"

#include <cctype>

namespace pddlwb::sexpr {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<Node> run() {
    std::vector<Node> top;
    std::vector<Node> stack;
    while (true) {
      skip_blank();
      if (pos_ >= text_.size()) break;
      const Location here{line_, column_};
      const char c = text_[pos_];
      if (c == '(') {
        advance();
        Node list;
        list.is_list = true;
        list.where = here;
        stack.push_back(std::move(list));
      } else if (c == ')') {
        advance();
        if (stack.empty()) {
          throw Error(Errc::UnbalancedParens, "unexpected ')'", here);
        }
        Node done = std::move(stack.back());
        stack.pop_back();
        emit(std::move(done), stack, top);
      } else {
        Node sym;
        sym.where = here;
        sym.symbol = read_symbol();
        emit(std::move(sym), stack, top);
      }
    }
    if (!stack.empty()) {
      throw Error(Errc::UnbalancedParens, "unclosed '('", stack.back().where);
    }
    return top;
  }

 private:
  static void emit(Node node, std::vector<Node>& stack, std::vector<Node>& top) {
    if (stack.empty()) {
      top.push_back(std::move(node));
    } else {
      stack.back().children.push_back(std::move(node));
    }
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_blank() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  std::string read_symbol() {
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(' || c == ')' || c == ';' ||
          std::isspace(static_cast<unsigned char>(c))) {
        break;
      }
      advance();
    }
    return lowercase(text_.substr(start, pos_ - start));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

}  // namespace

std::vector<Node> read_all(std::string_view text) { return Reader(text).run(); }

}  // namespace pddlwb::sexpr
