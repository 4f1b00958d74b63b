// Command-line front end for the integer surface library.
//
// Exit status: 0 on success, 2 on a usage error, a failed verification, or a
// census containing errored rows.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "markoff/markoff.hpp"

namespace {

using markoff::i64;

constexpr const char* kUsage = R"(usage: markoff <command> [arguments]

commands:
  classify <m>
      Classify the level m and print one JSON line: verdict, witness or
      obstruction certificate, family tags.

  census --from A --to B [--jobs J] [--format csv|jsonl] [--out PATH]
      Classify every level in [A, B] (default: one worker, csv to stdout).
      Output is byte-identical for every worker count.

  family <id> --max N
      List the members m of a named family with |m| <= N, with their defining
      parameters and admissibility.

  sa-witness <m> [--exclude p1,p2,...]
      Print a verified witness (JSON) that the orbit misses a residue target
      away from the excluded primes and the archimedean place.

  picard-tables
      Print the six lattice cohomology tables behind the obstruction classes.

  value-set <m> <p|inf>
      Print the local invariant value set of the level m at one place.

  help
      Print this message.
)";

int usage_error(const std::string& msg) {
    if (!msg.empty()) std::cerr << "error: " << msg << "\n";
    std::cerr << kUsage;
    return 2;
}

bool parse_i64(const std::string& s, i64& out) {
    try {
        size_t pos = 0;
        out = std::stoll(s, &pos);
        return pos == s.size() && !s.empty();
    } catch (const std::exception&) {
        return false;
    }
}

// Flag values for a subcommand: flags["--from"] = "2", positionals in order.
struct Args {
    std::vector<std::string> positional;
    std::vector<std::pair<std::string, std::string>> flags;

    const std::string* flag(const std::string& name) const {
        for (const auto& [k, v] : flags)
            if (k == name) return &v;
        return nullptr;
    }
};

bool split_args(int argc, char** argv, int start, Args& out, std::string& err) {
    for (int i = start; i < argc; ++i) {
        const std::string a = argv[i];
        if (a.rfind("--", 0) == 0) {
            if (i + 1 >= argc) {
                err = "flag " + a + " needs a value";
                return false;
            }
            out.flags.emplace_back(a, argv[++i]);
        } else {
            out.positional.push_back(a);
        }
    }
    return true;
}

int cmd_classify(const Args& args) {
    i64 m = 0;
    if (args.positional.size() != 1 || !args.flags.empty() ||
        !parse_i64(args.positional[0], m))
        return usage_error("classify expects one integer level");
    const markoff::Classification row = markoff::classify_or_record(m);
    std::cout << row.json_line() << "\n";
    return row.verdict == markoff::Verdict::error ? 2 : 0;
}

int cmd_census(const Args& args) {
    if (!args.positional.empty()) return usage_error("census takes only flags");
    const std::string* from_s = args.flag("--from");
    const std::string* to_s = args.flag("--to");
    i64 from = 0, to = 0;
    if (!from_s || !to_s || !parse_i64(*from_s, from) || !parse_i64(*to_s, to))
        return usage_error("census needs integer --from and --to");
    i64 jobs = 1;
    if (const std::string* j = args.flag("--jobs"))
        if (!parse_i64(*j, jobs) || jobs < 1 || jobs > 256)
            return usage_error("--jobs must be an integer in [1, 256]");
    markoff::CensusFormat format = markoff::CensusFormat::csv;
    if (const std::string* f = args.flag("--format")) {
        if (*f == "csv") format = markoff::CensusFormat::csv;
        else if (*f == "jsonl") format = markoff::CensusFormat::jsonl;
        else return usage_error("--format must be csv or jsonl");
    }
    markoff::CensusReport rep = markoff::census(from, to, static_cast<int>(jobs));
    const std::string rendered = rep.render(format);
    if (const std::string* path = args.flag("--out")) {
        std::ofstream os(*path, std::ios::binary);
        if (!os) return usage_error("cannot open " + *path + " for writing");
        os << rendered;
        if (!os.flush()) {
            std::cerr << "error: failed writing " << *path << "\n";
            return 2;
        }
    } else {
        std::cout << rendered;
    }
    if (rep.errors() > 0) {
        std::cerr << "error: " << rep.errors() << " level(s) failed to classify\n";
        return 2;
    }
    return 0;
}

int cmd_family(const Args& args) {
    if (args.positional.size() != 1) return usage_error("family expects one family id");
    const std::string* max_s = args.flag("--max");
    i64 bound = 0;
    if (!max_s || !parse_i64(*max_s, bound))
        return usage_error("family needs an integer --max bound");
    const auto members = markoff::family_members(args.positional[0], bound);
    std::cout << "m,family,r,v,a,l,admissible\n";
    for (const auto& fm : members) {
        std::cout << fm.m << "," << fm.family << "," << fm.r << "," << fm.v << ",";
        if (fm.a != 0) std::cout << fm.a;
        std::cout << ",";
        if (fm.l != 0) std::cout << fm.l;
        std::cout << "," << (fm.admissible ? "true" : "false") << "\n";
    }
    std::cout << "# members: " << members.size() << "\n";
    return 0;
}

int cmd_sa_witness(const Args& args) {
    i64 m = 0;
    if (args.positional.size() != 1 || !parse_i64(args.positional[0], m))
        return usage_error("sa-witness expects one integer level");
    std::vector<i64> excluded;
    if (const std::string* list = args.flag("--exclude")) {
        std::istringstream is(*list);
        std::string item;
        while (std::getline(is, item, ',')) {
            i64 p = 0;
            if (!parse_i64(item, p) || p < 2)
                return usage_error("--exclude wants a comma-separated list of primes");
            excluded.push_back(p);
        }
    }
    const markoff::SAWitness w = markoff::sa_witness(markoff::SurfaceParams(m), excluded);
    std::cout << w.json() << "\n";
    if (!w.verify()) {
        std::cerr << "error: witness failed verification\n";
        return 2;
    }
    return 0;
}

int cmd_picard_tables(const Args& args) {
    if (!args.positional.empty() || !args.flags.empty())
        return usage_error("picard-tables takes no arguments");
    for (const auto& t : markoff::picard_tables())
        std::cout << t.lattice << " " << t.case_name << ": H1 = " << t.h1.str() << "\n";
    return 0;
}

int cmd_value_set(const Args& args) {
    i64 m = 0;
    if (args.positional.size() != 2 || !parse_i64(args.positional[0], m))
        return usage_error("value-set expects a level and a place");
    const markoff::SurfaceParams sp(m);
    markoff::LocalValueSet vs =
        args.positional[1] == "inf"
            ? markoff::real_value_set(sp)
            : [&] {
                  i64 p = 0;
                  if (!parse_i64(args.positional[1], p))
                      throw std::domain_error("place must be a prime or inf");
                  return markoff::local_value_set(sp, p);
              }();
    std::cout << vs.str() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) return usage_error("");
    const std::string cmd = argv[1];
    if (cmd == "help" || cmd == "--help" || cmd == "-h") {
        std::cout << kUsage;
        return 0;
    }
    Args args;
    std::string err;
    if (!split_args(argc, argv, 2, args, err)) return usage_error(err);
    try {
        if (cmd == "classify") return cmd_classify(args);
        if (cmd == "census") return cmd_census(args);
        if (cmd == "family") return cmd_family(args);
        if (cmd == "sa-witness") return cmd_sa_witness(args);
        if (cmd == "picard-tables") return cmd_picard_tables(args);
        if (cmd == "value-set") return cmd_value_set(args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return usage_error("unknown command: " + cmd);
}
