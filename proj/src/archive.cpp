// Apache License, Version 2.0, refer to LICENSE.txt

#include "bpddp/archive.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "bpddp/errors.hpp"

namespace bpddp {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ChainArchive::set_meta(const std::string& key, const std::string& value) {
  for (auto& kv : meta) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  meta.emplace_back(key, value);
}

std::string ChainArchive::meta_value(const std::string& key) const {
  for (const auto& kv : meta)
    if (kv.first == key) return kv.second;
  return "";
}

void ChainArchive::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open archive for writing: " + path.string());

  out << "# bpddp chain archive v1\n";
  for (const auto& [k, v] : meta) out << "meta " << k << " " << v << "\n";
  for (const auto& t : traces) {
    out << "trace " << t.sweep << " " << t.clusters[0] << " " << t.clusters[1]
        << " " << format_double(t.alpha1) << " " << format_double(t.alpha2)
        << " " << t.dstar << " " << t.nstar << "\n";
  }
  for (const auto& p : predictive) {
    out << "pred " << p.sweep << " " << format_double(p.y1) << " "
        << format_double(p.y2) << "\n";
  }
  for (const auto& r : records) {
    out << "rec " << r.sweep << " " << format_double(r.alpha1) << " "
        << format_double(r.alpha2) << " " << r.vstar_accepted << " "
        << r.vstar_attempted << " " << r.alpha_accepted << " "
        << r.alpha_attempted << "\n";
    for (std::size_t i = 0; i < r.allocations.size(); ++i) {
      out << "recd" << (i + 1);
      for (int d : r.allocations[i]) out << " " << d;
      out << "\n";
    }
    for (const auto& [k, atom] : r.atoms) {
      out << "reca " << k << " " << format_double(atom.mu) << " "
          << format_double(atom.sigma2) << "\n";
    }
    for (std::size_t i = 0; i < r.weights.size(); ++i) {
      out << "recw" << (i + 1);
      for (double w : r.weights[i]) out << " " << format_double(w);
      out << "\n";
    }
    if (!r.aux.empty()) {
      out << "recaux";
      for (double v : r.aux) out << " " << format_double(v);
      out << "\n";
    }
    out << "recend\n";
  }
  if (!out) throw IoError("archive write failed: " + path.string());
}

ChainArchive ChainArchive::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open archive: " + path.string());

  ChainArchive archive;
  std::string line;
  int line_no = 0;
  ArchiveRecord* open_rec = nullptr;
  auto fail = [&](const std::string& what) {
    throw IoError(path.string() + ":" + std::to_string(line_no) + ": " + what);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "meta") {
      std::string key;
      ss >> key;
      std::string value;
      std::getline(ss, value);
      if (!value.empty() && value.front() == ' ') value.erase(0, 1);
      archive.meta.emplace_back(key, value);
    } else if (tag == "trace") {
      TraceRow t;
      if (!(ss >> t.sweep >> t.clusters[0] >> t.clusters[1] >> t.alpha1 >>
            t.alpha2 >> t.dstar >> t.nstar))
        fail("malformed trace row");
      archive.traces.push_back(t);
    } else if (tag == "pred") {
      PredRow p;
      if (!(ss >> p.sweep >> p.y1 >> p.y2)) fail("malformed pred row");
      archive.predictive.push_back(p);
    } else if (tag == "rec") {
      archive.records.emplace_back();
      open_rec = &archive.records.back();
      if (!(ss >> open_rec->sweep >> open_rec->alpha1 >> open_rec->alpha2 >>
            open_rec->vstar_accepted >> open_rec->vstar_attempted >>
            open_rec->alpha_accepted >> open_rec->alpha_attempted))
        fail("malformed rec row");
    } else if (tag.rfind("recd", 0) == 0) {
      if (!open_rec) fail("allocation row outside a record");
      const std::size_t idx = std::stoul(tag.substr(4)) - 1;
      if (open_rec->allocations.size() <= idx)
        open_rec->allocations.resize(idx + 1);
      int d;
      while (ss >> d) open_rec->allocations[idx].push_back(d);
    } else if (tag == "reca") {
      if (!open_rec) fail("atom row outside a record");
      int k;
      Atom atom;
      if (!(ss >> k >> atom.mu >> atom.sigma2)) fail("malformed atom row");
      open_rec->atoms.emplace_back(k, atom);
    } else if (tag.rfind("recw", 0) == 0) {
      if (!open_rec) fail("weight row outside a record");
      const std::size_t idx = std::stoul(tag.substr(4)) - 1;
      if (open_rec->weights.size() <= idx) open_rec->weights.resize(idx + 1);
      double w;
      while (ss >> w) open_rec->weights[idx].push_back(w);
    } else if (tag == "recaux") {
      if (!open_rec) fail("aux row outside a record");
      double v;
      while (ss >> v) open_rec->aux.push_back(v);
    } else if (tag == "recend") {
      open_rec = nullptr;
    } else {
      fail("unknown tag: " + tag);
    }
  }
  return archive;
}

}  // namespace bpddp
