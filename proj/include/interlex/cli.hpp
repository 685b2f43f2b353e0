#pragma once

// Command-line surface. Exit codes: 0 success, 1 domain or validation
// failure, 2 usage error, 3 parse or I/O error.

#include <algorithm>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "httplib.h"
#include "interlex/facade.hpp"
#include "interlex/service.hpp"
#include "interlex/store.hpp"

namespace interlex::cli {

enum ExitCode : int { kOk = 0, kDomain = 1, kUsage = 2, kParse = 3 };

inline int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::ParseFailure:
    case Errc::IoFailure:
      return kParse;
    default:
      return kDomain;
  }
}

inline int exit_code_for_status(int status) {
  if (status == 200) return kOk;
  if (status == 400) return kUsage;
  return kDomain;
}

// Splits "path?k=v&..." into the path and decoded query parameters.
inline std::pair<std::string, QueryParams> split_target(const std::string& target) {
  auto q = target.find('?');
  std::string path = httplib::detail::decode_url(target.substr(0, q), false);
  QueryParams params;
  if (q != std::string::npos) {
    httplib::Params raw;
    httplib::detail::parse_query_text(target.substr(q + 1), raw);
    for (const auto& [k, v] : raw) params.emplace(k, v);
  }
  return {path, params};
}

inline json read_json_input(const std::string& file) { return read_json_file(file, file); }

inline StatementInstance read_instance(const Store& s, const std::string& file) {
  return instance_from_json(read_json_input(file), s.prefixes);
}

// Reads a crosswalk document, or looks up a registered crosswalk when the
// argument is not an existing file.
inline Crosswalk crosswalk_arg(const Store& s, const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) return crosswalk_from_json(read_json_input(arg), s.prefixes);
  return s.crosswalks.get(s.prefixes.canonicalize(arg));
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"interlex: terminology, schema and operations registry for FAIR statements"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  std::string store_dir = ".";
  app.add_option("--store", store_dir, "Store root directory")->capture_default_str();

  std::function<int()> action;
  auto load = [&] { return load_store(store_dir); };
  auto emit = [&](const json& j) {
    out << render_document(j);
    return kOk;
  };
  auto id_of = [](const Store& s, const std::string& text) { return s.prefixes.canonicalize(text); };

  // init
  app.add_subcommand("init", "Create an empty store")->callback([&] {
    action = [&] {
      init_store(store_dir);
      return kOk;
    };
  });

  // import
  auto* import = app.add_subcommand("import", "Import a file into the store");
  import->require_subcommand(1);
  bool parent_first = false;
  std::string import_file;
  auto import_kind = [&](const char* name, const char* help, auto&& register_into) {
    auto* sub = import->add_subcommand(name, help);
    sub->add_option("file", import_file, "Input file")->required();
    sub->callback([&, register_into] {
      action = [&, register_into] {
        Store s = load();
        int rc = register_into(s);
        export_store(s, store_dir);
        return rc;
      };
    });
    return sub;
  };
  import_kind("terms", "Import term records, one JSON object per line", [&](Store& s) {
    std::istringstream in(read_file(import_file));
    std::string line;
    std::size_t n = 0, count = 0;
    while (std::getline(in, line)) {
      ++n;
      if (line.empty() || line == "\r") continue;
      try {
        s.terms.register_term(term_from_json(parse_json_line(line, import_file, n), s.prefixes));
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        if (e.code() == Errc::ConflictingTermRecord) throw;
        throw ParseError(import_file, n, e.what());
      }
      ++count;
    }
    emit(json{{"accepted", count}});
    return kOk;
  });
  import_kind("mappings", "Import an SSSOM-style mapping table", [&](Store& s) {
    auto report = s.terms.import_mappings_tsv(read_file(import_file), s.prefixes, {parent_first});
    json rejected = json::array();
    for (const auto& r : report.rejected) rejected.push_back(json{{"line", r.line}, {"reason", r.reason}});
    emit(json{{"accepted", report.accepted}, {"rejected", rejected}});
    return report.rejected.empty() ? kOk : kDomain;
  })->add_flag("--parent-first", parent_first, "Read subClassOf/subPropertyOf rows as parent-first");
  import_kind("schema", "Import a statement schema document", [&](Store& s) {
    emit(json{{"registered", s.compact(s.schemas.register_schema(schema_from_json(read_json_input(import_file), s.prefixes)))}});
    return kOk;
  });
  import_kind("crosswalk", "Import a schema crosswalk document", [&](Store& s) {
    auto id = s.crosswalks.register_crosswalk(s.schemas, s.terms,
                                              crosswalk_from_json(read_json_input(import_file), s.prefixes));
    emit(json{{"registered", s.compact(id)},
              {"level", crosswalk_level_name(s.crosswalks.get(id).level)}});
    return kOk;
  });
  import_kind("operation", "Import an operation descriptor", [&](Store& s) {
    auto id = s.operations.register_operation(s.schemas, operation_from_json(read_json_input(import_file), s.prefixes));
    emit(json{{"registered", s.compact(id)}});
    return kOk;
  });
  import_kind("fdo", "Import a FAIR Digital Object record", [&](Store& s) {
    emit(json{{"registered", s.compact(s.fdos.register_fdo(fdo_from_json(read_json_input(import_file), s.prefixes)))}});
    return kOk;
  });

  // export
  std::string export_dir;
  auto* exp = app.add_subcommand("export", "Write the store in canonical form");
  exp->add_option("--out", export_dir, "Destination directory (default: the store itself)");
  exp->callback([&] {
    action = [&] {
      export_store(load(), export_dir.empty() ? store_dir : export_dir);
      return kOk;
    };
  });

  // terminology queries
  double min_confidence = 0.0;
  std::string arg_a, arg_b, arg_c;
  auto* closure = app.add_subcommand("closure", "Print ontological and referential classes and hierarchy");
  closure->add_option("--min-confidence", min_confidence)->check(CLI::Range(0.0, 1.0));
  closure->callback([&] {
    action = [&] {
      Store s = load();
      return emit(Facade(s).closure(min_confidence));
    };
  });
  auto* interop = app.add_subcommand("interop", "Interoperability level of two terms");
  interop->add_option("a", arg_a)->required();
  interop->add_option("b", arg_b)->required();
  interop->add_option("--min-confidence", min_confidence)->check(CLI::Range(0.0, 1.0));
  interop->callback([&] {
    action = [&] {
      Store s = load();
      return emit(Facade(s).interop(id_of(s, arg_a), id_of(s, arg_b), min_confidence));
    };
  });
  auto* explain = app.add_subcommand("explain", "Witness mapping path behind an interop verdict");
  explain->add_option("a", arg_a)->required();
  explain->add_option("b", arg_b)->required();
  explain->add_option("--min-confidence", min_confidence)->check(CLI::Range(0.0, 1.0));
  explain->callback([&] {
    action = [&] {
      Store s = load();
      return emit(Facade(s).explain(id_of(s, arg_a), id_of(s, arg_b), min_confidence));
    };
  });
  auto* audit = app.add_subcommand("audit-term", "FAIRness checks for a term record");
  audit->add_option("term", arg_a)->required();
  audit->callback([&] {
    action = [&] {
      Store s = load();
      return emit(Facade(s).audit_term(id_of(s, arg_a)));
    };
  });

  // schemas
  bool strict = false;
  auto* validate = app.add_subcommand("validate", "Validate a statement instance against its schema");
  validate->add_option("instance", arg_a, "Instance file")->required();
  validate->add_flag("--strict", strict, "Require ontological constraint satisfaction");
  validate->add_option("--min-confidence", min_confidence)->check(CLI::Range(0.0, 1.0));
  validate->callback([&] {
    action = [&] {
      Store s = load();
      auto inst = read_instance(s, arg_a);
      auto report = validate_instance(s.schemas, s.terms, inst, {strict, min_confidence});
      emit(to_json(report));
      return report.valid ? kOk : kDomain;
    };
  });

  auto* cw = app.add_subcommand("crosswalk", "Crosswalk checks and algebra");
  cw->require_subcommand(1);
  auto* cw_check = cw->add_subcommand("check", "Per-alignment compatibility report");
  cw_check->add_option("crosswalk", arg_a, "Crosswalk file or registered id")->required();
  cw_check->callback([&] {
    action = [&] {
      Store s = load();
      auto c = crosswalk_arg(s, arg_a);
      json j = Facade(s).check(c);
      emit(j);
      return check_crosswalk(s.schemas, s.terms, c).registrable() ? kOk : kDomain;
    };
  });
  auto* cw_classify = cw->add_subcommand("classify", "Ontological or referential level");
  cw_classify->add_option("crosswalk", arg_a, "Crosswalk file or registered id")->required();
  cw_classify->callback([&] {
    action = [&] {
      Store s = load();
      return emit(Facade(s).classify(crosswalk_arg(s, arg_a)));
    };
  });
  auto* cw_compose = cw->add_subcommand("compose", "Compose two registered crosswalks A->B, B->C");
  cw_compose->add_option("first", arg_a)->required();
  cw_compose->add_option("second", arg_b)->required();
  cw_compose->callback([&] {
    action = [&] {
      Store s = load();
      return emit(Facade(s).compose(id_of(s, arg_a), id_of(s, arg_b)));
    };
  });
  auto* cw_invert = cw->add_subcommand("invert", "Invert a registered crosswalk");
  cw_invert->add_option("crosswalk", arg_a)->required();
  cw_invert->callback([&] {
    action = [&] {
      Store s = load();
      return emit(Facade(s).invert(id_of(s, arg_a)));
    };
  });

  auto* transform = app.add_subcommand("transform", "Transform an instance through a registered crosswalk");
  transform->add_option("instance", arg_a, "Instance file")->required();
  transform->add_option("crosswalk", arg_b, "Crosswalk id")->required();
  transform->add_flag("--strict", strict, "Refuse referential-only term rewrites");
  transform->add_option("--min-confidence", min_confidence)->check(CLI::Range(0.0, 1.0));
  transform->callback([&] {
    action = [&] {
      Store s = load();
      TransformOptions opts{min_confidence, !strict};
      auto result = Facade(s).transform(read_instance(s, arg_a), id_of(s, arg_b), opts);
      for (const auto& w : result.warnings) err << "warning: " << w << "\n";
      return emit(to_json(result.instance, s.prefixes));
    };
  });

  std::string strategy = "pairwise";
  std::vector<std::string> plan_schemas;
  auto* plan = app.add_subcommand("plan", "Crosswalks required to connect a set of schemas");
  plan->add_option("--strategy", strategy, "pairwise or hub=<schema-id>")->capture_default_str();
  plan->add_option("schemas", plan_schemas, "Schema ids (default: all registered)");
  plan->callback([&] {
    action = [&] {
      Store s = load();
      PlanStrategy st;
      if (strategy.rfind("hub=", 0) == 0) {
        st = PlanStrategy::with_hub(id_of(s, strategy.substr(4)));
      } else if (strategy != "pairwise") {
        throw CLI::ValidationError("--strategy", "expected pairwise or hub=<id>");
      }
      std::vector<Gupri> ids;
      for (const auto& p : plan_schemas) ids.push_back(id_of(s, p));
      if (plan_schemas.empty())
        for (const auto& [sid, sch] : s.schemas.schemas()) ids.push_back(sid);
      return emit(Facade(s).plan(ids, st));
    };
  });

  // operations
  auto* ops = app.add_subcommand("ops", "Operations service");
  ops->require_subcommand(1);
  bool direct_only = false;
  auto* ops_app = ops->add_subcommand("applicable", "Operations applicable to a schema");
  ops_app->add_option("schema", arg_a)->required();
  ops_app->add_flag("--direct", direct_only, "Ignore operations reachable through crosswalks");
  ops_app->callback([&] {
    action = [&] {
      Store s = load();
      return emit(Facade(s).operations(id_of(s, arg_a), !direct_only));
    };
  });
  auto* ops_x = ops->add_subcommand("x-interop", "Whether one operation applies to two schemas");
  ops_x->add_option("a", arg_a)->required();
  ops_x->add_option("b", arg_b)->required();
  ops_x->add_option("operation", arg_c)->required();
  ops_x->callback([&] {
    action = [&] {
      Store s = load();
      return emit(Facade(s).x_interop(id_of(s, arg_a), id_of(s, arg_b), id_of(s, arg_c)));
    };
  });
  std::string value_slot = "VALUE", unit_slot = "UNIT", target_unit;
  auto* ops_conv = ops->add_subcommand("convert-unit", "Convert a measured value to another mass unit");
  ops_conv->add_option("instance", arg_a, "Instance file")->required();
  ops_conv->add_option("--to", target_unit, "Target unit id")->required();
  ops_conv->add_option("--value-slot", value_slot)->capture_default_str();
  ops_conv->add_option("--unit-slot", unit_slot)->capture_default_str();
  ops_conv->callback([&] {
    action = [&] {
      Store s = load();
      return emit(Facade(s).convert(read_instance(s, arg_a), value_slot, unit_slot, id_of(s, target_unit)));
    };
  });

  auto* act = app.add_subcommand("actionability", "Readable / Interpretable / Actionable class of an instance file");
  act->add_option("instance", arg_a, "Instance file")->required();
  act->callback([&] {
    action = [&] {
      Store s = load();
      return emit(Facade(s).actionability(read_file(arg_a)));
    };
  });

  // FDO records
  std::string record_file;
  bool assess_all = false;
  auto* assess = app.add_subcommand("assess", "FAIRness assessment of a FAIR Digital Object");
  assess->add_option("fdo", arg_a, "Registered FDO id");
  assess->add_option("--file", record_file, "Assess an unregistered record document");
  assess->add_flag("--all", assess_all, "Aggregate over every registered record");
  assess->callback([&] {
    action = [&] {
      Store s = load();
      Facade f(s);
      if (assess_all) {
        std::vector<Gupri> ids;
        for (const auto& [fid, r] : s.fdos.records()) ids.push_back(fid);
        return emit(to_json(assess_collection(s.terms, s.schemas, s.crosswalks, s.fdos, ids)));
      }
      if (!record_file.empty()) return emit(f.assess_record_payload(read_json_input(record_file)));
      if (arg_a.empty()) throw CLI::RequiredError("fdo, --file or --all");
      return emit(f.assessment(id_of(s, arg_a)));
    };
  });

  std::string find_term, find_expand, find_type, find_category;
  auto* findc = app.add_subcommand("find", "Find FDOs by term, statement type or category");
  findc->add_option("--term", find_term);
  findc->add_option("--expand", find_expand, "none, ontological or referential")
      ->check(CLI::IsMember({"none", "ontological", "referential"}));
  findc->add_option("--statement-type", find_type);
  findc->add_option("--category", find_category);
  findc->callback([&] {
    action = [&] {
      Store s = load();
      Facade f(s);
      QueryParams q{{"term", find_term}, {"expand", find_expand}, {"statement_type", find_type}, {"category", find_category}};
      return emit(f.find_payload(f.find_query(q)));
    };
  });

  std::string target;
  auto* get = app.add_subcommand("get", "Answer a GET request of the service endpoint table");
  get->add_option("target", target, "Path with optional query, e.g. /interop?a=X&b=Y")->required();
  get->callback([&] {
    action = [&] {
      Store s = load();
      auto [path, q] = split_target(target);
      Response r = Facade(s).route("GET", path, q);
      out << render_document(r.body);
      return exit_code_for_status(r.status);
    };
  });

  std::string bind_address = "127.0.0.1:8080";
  auto* serve = app.add_subcommand("serve", "Serve the store over HTTP");
  serve->add_option("--bind", bind_address, "host:port")->capture_default_str();
  serve->callback([&] {
    action = [&] {
      auto colon = bind_address.rfind(':');
      if (colon == std::string::npos) throw CLI::ValidationError("--bind", "expected host:port");
      int port = 0;
      try {
        port = std::stoi(bind_address.substr(colon + 1));
      } catch (const std::exception&) {
        throw CLI::ValidationError("--bind", "bad port");
      }
      Service svc(std::make_shared<const Store>(load()));
      int bound = svc.bind(bind_address.substr(0, colon), port);
      out << "listening on " << bind_address.substr(0, colon) << ":" << bound << std::endl;
      svc.serve();
      return kOk;
    };
  });

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
    return action ? action() : kOk;
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kUsage;
  } catch (const interlex::ParseError& e) {
    err << "interlex: " << e.what() << "\n";
    return kParse;
  } catch (const Error& e) {
    err << "interlex: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const json::exception& e) {
    err << "interlex: " << e.what() << "\n";
    return kParse;
  }
}

}  // namespace interlex::cli
