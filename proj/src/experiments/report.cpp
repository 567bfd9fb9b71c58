#include "scgan/experiments/report.h"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "scgan/error.h"
#include "scgan/io/formats.h"

namespace scgan::experiments {

namespace {

std::string flatten(const Confusion& c) {
  std::string s;
  for (const auto& row : c) {
    for (auto v : row) {
      if (!s.empty()) s += ';';
      s += std::to_string(v);
    }
  }
  return s;
}

Confusion unflatten(const std::string& s) {
  std::vector<std::size_t> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) v.push_back(std::stoull(item));
  const auto k = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (k * k != v.size()) throw ValidationError("report: confusion matrix is not square");
  Confusion c(k, std::vector<std::size_t>(k));
  for (std::size_t i = 0; i < v.size(); ++i) c[i / k][i % k] = v[i];
  return c;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  return f;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               const std::string& header) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(f, line) || line != header) {
    throw ValidationError(path.string() + ": expected header '" + header + "'");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(f, line)) {
    if (!line.empty()) rows.push_back(io::split_csv_line(line));
  }
  return rows;
}

const char* kReportHeader =
    "row,run,dev_uar,test_uar,synthetic_added,dev_confusion,test_confusion";
const char* kSweepHeader = "m,runs,dev_mean,dev_sd,test_mean,test_sd";

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void export_report(const EvalReport& report, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << kReportHeader << '\n';
  for (std::size_t r = 0; r < report.runs.size(); ++r) {
    const auto& x = report.runs[r];
    f << "run," << r << ',' << io::format_double(x.dev_uar) << ',' << io::format_double(x.test_uar)
      << ',' << x.synthetic_added << ',' << flatten(x.dev_confusion) << ','
      << flatten(x.test_confusion) << '\n';
  }
  f << "mean,," << io::format_double(report.dev.mean) << ',' << io::format_double(report.test.mean)
    << ",,,\n";
  f << "sd,," << io::format_double(report.dev.sd) << ',' << io::format_double(report.test.sd)
    << ",,,\n";
  if (!f) throw IoError("failed writing " + path.string());
}

EvalReport read_report(const std::filesystem::path& path) {
  EvalReport rep;
  try {
    for (const auto& row : read_csv(path, kReportHeader)) {
      if (row.size() != 7) throw ValidationError(path.string() + ": expected 7 columns");
      if (row[0] == "run") {
        RunResult r;
        r.dev_uar = std::stod(row[2]);
        r.test_uar = std::stod(row[3]);
        r.synthetic_added = std::stoull(row[4]);
        r.dev_confusion = unflatten(row[5]);
        r.test_confusion = unflatten(row[6]);
        rep.runs.push_back(std::move(r));
      } else if (row[0] == "mean") {
        rep.dev.mean = std::stod(row[2]);
        rep.test.mean = std::stod(row[3]);
      } else if (row[0] == "sd") {
        rep.dev.sd = std::stod(row[2]);
        rep.test.sd = std::stod(row[3]);
      } else {
        throw ValidationError(path.string() + ": unknown row kind '" + row[0] + "'");
      }
    }
  } catch (const std::invalid_argument& e) {
    if (dynamic_cast<const ValidationError*>(&e)) throw;
    throw ValidationError(path.string() + ": malformed number");
  }
  return rep;
}

void export_sweep(const std::vector<SweepPoint>& points, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << kSweepHeader << '\n';
  for (const auto& p : points) {
    f << p.m << ',' << p.runs << ',' << io::format_double(p.dev.mean) << ','
      << io::format_double(p.dev.sd) << ',' << io::format_double(p.test.mean) << ','
      << io::format_double(p.test.sd) << '\n';
  }
  if (!f) throw IoError("failed writing " + path.string());
}

std::vector<SweepPoint> read_sweep(const std::filesystem::path& path) {
  std::vector<SweepPoint> out;
  try {
    for (const auto& row : read_csv(path, kSweepHeader)) {
      if (row.size() != 6) throw ValidationError(path.string() + ": expected 6 columns");
      out.push_back({std::stoull(row[0]),
                     {std::stod(row[2]), std::stod(row[3])},
                     {std::stod(row[4]), std::stod(row[5])},
                     std::stoull(row[1])});
    }
  } catch (const std::invalid_argument& e) {
    if (dynamic_cast<const ValidationError*>(&e)) throw;
    throw ValidationError(path.string() + ": malformed number");
  }
  return out;
}

void export_trace(const gan::TrainTrace& trace, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << "step,turn,network,generator_loss,discriminator_loss,generator_threshold,"
       "discriminator_threshold\n";
  for (const auto& r : trace.records) {
    f << r.step << ',' << r.turn << ',' << gan::to_string(r.network) << ','
      << io::format_double(r.generator_loss) << ',' << io::format_double(r.discriminator_loss)
      << ',' << io::format_double(r.generator_threshold) << ','
      << io::format_double(r.discriminator_threshold) << '\n';
  }
  if (!f) throw IoError("failed writing " + path.string());
}

std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& o) {
  const double W = o.width, H = o.height;
  const double left = 70, right = 150, top = 40, bottom = 55;
  const double pw = W - left - right, ph = H - top - bottom;

  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool any = false;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      if (!any) {
        x0 = x1 = p.x;
        y0 = p.y - p.sd;
        y1 = p.y + p.sd;
        any = true;
      }
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y - p.sd);
      y1 = std::max(y1, p.y + p.sd);
    }
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };
  auto num = [](double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
  };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W
      << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!o.title.empty()) {
    svg << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(o.title) << "</text>\n";
  }
  // Axes with five ticks each.
  svg << "<g stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\""
      << top + ph << "\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
      << "\"/>\n</g>\n<g font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    svg << "<line x1=\"" << sx(xv) << "\" y1=\"" << top + ph << "\" x2=\"" << sx(xv) << "\" y2=\""
        << top + ph + 5 << "\" stroke=\"black\"/>"
        << "<text x=\"" << sx(xv) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
        << num(xv) << "</text>\n"
        << "<line x1=\"" << left - 5 << "\" y1=\"" << sy(yv) << "\" x2=\"" << left << "\" y2=\""
        << sy(yv) << "\" stroke=\"black\"/>"
        << "<text x=\"" << left - 8 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">"
        << num(yv) << "</text>\n";
  }
  svg << "</g>\n<text x=\"" << left + pw / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(o.x_label) << "</text>\n"
      << "<text transform=\"translate(18," << top + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" << escape(o.y_label)
      << "</text>\n";

  if (!any) {
    svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << top + ph / 2
        << "\" text-anchor=\"middle\" font-size=\"14\" fill=\"#888\">no data</text>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* c = colors[i % 8];
    auto pts = s.points;
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
    if (!pts.empty()) {
      svg << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"";
      for (const auto& p : pts) svg << sx(p.x) << ',' << sy(p.y) << ' ';
      svg << "\"/>\n";
    }
    for (const auto& p : pts) {
      svg << "<line x1=\"" << sx(p.x) << "\" y1=\"" << sy(p.y - p.sd) << "\" x2=\"" << sx(p.x)
          << "\" y2=\"" << sy(p.y + p.sd) << "\" stroke=\"" << c << "\"/>"
          << "<circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y) << "\" r=\"3\" fill=\"" << c
          << "\"/>\n";
    }
    const double ly = top + 10 + 18.0 * static_cast<double>(i);
    svg << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 35
        << "\" y2=\"" << ly << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>"
        << "<text x=\"" << left + pw + 40 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">"
        << escape(s.name) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void export_plot(const std::vector<PlotSeries>& series, const std::filesystem::path& path,
                 const PlotOptions& options) {
  auto f = open_out(path);
  f << render_svg(series, options);
  if (!f) throw IoError("failed writing " + path.string());
}

Projection pca_2d(const std::vector<std::vector<double>>& rows) {
  if (rows.size() < 2) throw ValidationError("pca: need at least two rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(rows.front().size());
  if (d < 2) throw ValidationError("pca: need at least two columns");
  Eigen::MatrixXd X(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    require_dims(static_cast<Eigen::Index>(rows[i].size()) == d, "pca: ragged rows");
    for (Eigen::Index j = 0; j < d; ++j) X(i, j) = rows[i][j];
  }
  const Eigen::RowVectorXd mu = X.colwise().mean();
  X.rowwise() -= mu;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinV);
  const auto& V = svd.matrixV();

  Projection p;
  p.mean.assign(mu.data(), mu.data() + d);
  for (int c = 0; c < 2; ++c) {
    // Sign convention: the largest-magnitude loading is positive.
    Eigen::VectorXd axis = V.col(c);
    Eigen::Index arg = 0;
    axis.cwiseAbs().maxCoeff(&arg);
    if (axis(arg) < 0) axis = -axis;
    p.axes[static_cast<std::size_t>(c)].assign(axis.data(), axis.data() + d);
    p.singular_values[static_cast<std::size_t>(c)] = svd.singularValues()(c);
  }
  p.points.resize(rows.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < 2; ++c) {
      double s = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) s += X(i, j) * p.axes[c][static_cast<std::size_t>(j)];
      p.points[static_cast<std::size_t>(i)][c] = s;
    }
  }
  return p;
}

}  // namespace scgan::experiments
