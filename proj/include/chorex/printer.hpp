#pragma once

#include <string>

#include "chorex/syntax.hpp"

namespace chorex {

// Canonical, deterministic text. parse(print(x)) is structurally equal to x.
std::string print_behaviour(const Behaviour& b);
std::string print_process_term(const ProcessName& name, const ProcessTerm& t);
std::string print_network(const Network& n);

std::string print_chor_body(const ChorBody& b);
std::string print_choreography(const Choreography& c);
std::string print_program(const Program& p);

}  // namespace chorex
