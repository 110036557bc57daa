#include "chorex/printer.hpp"

#include <sstream>

namespace chorex {

namespace {

void behaviour_to(const Behaviour& b, std::ostream& os) {
  std::visit(Match{
                 [&](const DoneB&) { os << "stop"; },
                 [&](const CallB& x) { os << x.name; },
                 [&](const SendB& x) {
                   os << x.to << "!<" << x.expr << ">; ";
                   behaviour_to(*x.cont, os);
                 },
                 [&](const RecvB& x) {
                   os << x.from << "?; ";
                   behaviour_to(*x.cont, os);
                 },
                 [&](const SelectB& x) {
                   os << x.to << " + " << x.label << "; ";
                   behaviour_to(*x.cont, os);
                 },
                 [&](const OfferB& x) {
                   os << x.from << "&{";
                   bool first = true;
                   for (const auto& [label, body] : x.branches) {
                     if (!first) os << ", ";
                     first = false;
                     os << label << ": ";
                     behaviour_to(*body, os);
                   }
                   os << "}";
                 },
                 [&](const CondB& x) {
                   os << "if " << x.expr << " then { ";
                   behaviour_to(*x.then_branch, os);
                   os << " } else { ";
                   behaviour_to(*x.else_branch, os);
                   os << " }";
                 },
             },
             b.node());
}

void chor_body_to(const ChorBody& b, std::ostream& os) {
  std::visit(Match{
                 [&](const DoneC&) { os << "stop"; },
                 [&](const CallC& x) { os << x.name; },
                 [&](const ComC& x) {
                   os << x.sender << "." << x.expr << " -> " << x.receiver << "; ";
                   chor_body_to(*x.cont, os);
                 },
                 [&](const SelC& x) {
                   os << x.sender << " -> " << x.receiver << "[" << x.label << "]; ";
                   chor_body_to(*x.cont, os);
                 },
                 [&](const CondC& x) {
                   os << "if " << x.decider << "." << x.expr << " then { ";
                   chor_body_to(*x.then_branch, os);
                   os << " } else { ";
                   chor_body_to(*x.else_branch, os);
                   os << " }";
                 },
             },
             b.node());
}

}  // namespace

std::string print_behaviour(const Behaviour& b) {
  std::ostringstream os;
  behaviour_to(b, os);
  return os.str();
}

std::string print_process_term(const ProcessName& name, const ProcessTerm& t) {
  std::ostringstream os;
  os << name << " { ";
  for (const auto& [def_name, body] : *t.defs) {
    os << "def " << def_name << " { ";
    behaviour_to(*body, os);
    os << " } ";
  }
  os << "main { ";
  behaviour_to(*t.main, os);
  os << " } }";
  return os.str();
}

std::string print_network(const Network& n) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, term] : n.processes) {
    if (!first) os << " |\n";
    first = false;
    os << print_process_term(name, term);
  }
  return os.str();
}

std::string print_chor_body(const ChorBody& b) {
  std::ostringstream os;
  chor_body_to(b, os);
  return os.str();
}

std::string print_choreography(const Choreography& c) {
  std::ostringstream os;
  for (const auto& [name, body] : *c.defs) {
    os << "def " << name << " { ";
    chor_body_to(*body, os);
    os << " } ";
  }
  os << "main { ";
  chor_body_to(*c.main, os);
  os << " }";
  return os.str();
}

std::string print_program(const Program& p) {
  std::ostringstream os;
  bool first = true;
  for (const auto& c : p.components) {
    if (!first) os << " ||\n";
    first = false;
    os << print_choreography(c);
  }
  return os.str();
}

}  // namespace chorex
