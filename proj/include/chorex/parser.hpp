#pragma once

#include <stdexcept>
#include <string>

#include "chorex/syntax.hpp"

namespace chorex {

struct ParseError : std::runtime_error {
  ParseError(int line, int column, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ", col " + std::to_string(column) +
                           ": " + message),
        line(line),
        column(column) {}
  int line;
  int column;
};

// Grammar (whitespace-insensitive, // line comments):
//
//   network      ::= procdecl ("|" procdecl)*
//   procdecl     ::= pname "{" ("def" Xname "{" behaviour "}")* "main" "{" behaviour "}" "}"
//   behaviour    ::= "stop" | Xname
//                  | pname "!<" expr ">;" behaviour
//                  | pname "?;" behaviour
//                  | pname "+" label ";" behaviour
//                  | pname "&{" label ":" behaviour ("," label ":" behaviour)* "}"
//                  | "if" expr "then" "{" behaviour "}" "else" "{" behaviour "}"
//
//   program      ::= chor ("||" chor)*
//   chor         ::= ("def" Xname "{" cbody "}")* "main" "{" cbody "}"
//   cbody        ::= "stop" | Xname
//                  | pname "." expr "->" pname ";" cbody
//                  | pname "->" pname "[" label "];" cbody
//                  | "if" pname "." expr "then" "{" cbody "}" "else" "{" cbody "}"
//
// Identifiers range over [A-Za-z0-9_*]; expressions are identifier atoms
// optionally joined by the infix operators + - / % == != <= >= &&.
Network parse_network(const std::string& text);
Program parse_choreography(const std::string& text);

}  // namespace chorex
