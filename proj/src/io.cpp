#include "klab/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace klab {

namespace {

constexpr char kMagic[8] = {'K', 'L', 'A', 'B', 'P', 'F', '1', '\0'};

void put_i64(std::ostream& os, std::int64_t v)
{
    unsigned char buf[8];
    for (int k = 0; k < 8; ++k)
        buf[k] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * k)) & 0xff);
    os.write(reinterpret_cast<const char*>(buf), 8);
}

std::int64_t get_i64(std::istream& is)
{
    unsigned char buf[8];
    is.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k)
        v |= static_cast<std::uint64_t>(buf[k]) << (8 * k);
    return static_cast<std::int64_t>(v);
}

} // namespace

void save_path_field(const PathField& field, const std::filesystem::path& file)
{
    std::ofstream os(file, std::ios::binary);
    if (!os)
        throw std::runtime_error("save_path_field: cannot open " + file.string());
    os.write(kMagic, 8);
    put_i64(os, field.values.rows());
    put_i64(os, field.values.cols());
    for (int i = 0; i < field.values.rows(); ++i)
        for (int j = 0; j < field.values.cols(); ++j) {
            double v = field.values(i, j);
            static_assert(sizeof(double) == 8);
            os.write(reinterpret_cast<const char*>(&v), 8);
        }
    if (!os)
        throw std::runtime_error("save_path_field: write failed for " + file.string());
}

Eigen::MatrixXd load_path_field_values(const std::filesystem::path& file)
{
    std::ifstream is(file, std::ios::binary);
    if (!is)
        throw std::runtime_error("load_path_field: cannot open " + file.string());
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("load_path_field: bad magic in " + file.string());
    const std::int64_t rows = get_i64(is);
    const std::int64_t cols = get_i64(is);
    if (!is || rows <= 0 || cols <= 0 || rows > (1 << 24) || cols > (1 << 24))
        throw std::runtime_error("load_path_field: bad dimensions in " + file.string());
    Eigen::MatrixXd values(rows, cols);
    for (std::int64_t i = 0; i < rows; ++i)
        for (std::int64_t j = 0; j < cols; ++j) {
            double v;
            is.read(reinterpret_cast<char*>(&v), 8);
            values(i, j) = v;
        }
    if (!is)
        throw std::runtime_error("load_path_field: truncated file " + file.string());
    return values;
}

PathField load_path_field(const PathGrid& grid, const std::filesystem::path& file)
{
    Eigen::MatrixXd values = load_path_field_values(file);
    if (values.rows() != grid.rows() || values.cols() != grid.cols())
        throw std::runtime_error("load_path_field: stored dims " + std::to_string(values.rows()) + "x" +
                                 std::to_string(values.cols()) + " do not match the grid");
    PathField f;
    f.grid = grid;
    f.values = std::move(values);
    return f;
}

std::string double_repr(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void export_path_field_csv(const PathField& field, const std::filesystem::path& file)
{
    std::ofstream os(file);
    if (!os)
        throw std::runtime_error("export_path_field_csv: cannot open " + file.string());
    os << "t,x,value\n";
    const auto& x = field.grid.model->nodes();
    for (int i = 0; i < field.grid.rows(); ++i)
        for (int j = 0; j < field.grid.cols(); ++j)
            os << double_repr(field.grid.time(i)) << ',' << double_repr(x[j]) << ','
               << double_repr(field.values(i, j)) << '\n';
}

nlohmann::ordered_json model_descriptor(const FiberModel& model)
{
    nlohmann::ordered_json j;
    j["kind"] = model.kind() == FiberKind::Torus ? "torus" : "sphere";
    j["n_x"] = model.intervals();
    if (model.kind() == FiberKind::Sphere) {
        j["half_width"] = model.half_width();
    } else if (model.background_potential()) {
        const auto& psi0 = *model.background_potential();
        j["psi0"] = std::vector<double>(psi0.data(), psi0.data() + psi0.size());
    }
    return j;
}

FiberModel model_from_descriptor(const nlohmann::json& j)
{
    const std::string kind = j.at("kind").get<std::string>();
    const int n_x = j.at("n_x").get<int>();
    if (kind == "sphere")
        return build_sphere_model(n_x, j.at("half_width").get<double>());
    if (kind != "torus")
        throw std::runtime_error("model_from_descriptor: unknown kind '" + kind + "'");
    if (j.contains("psi0")) {
        auto v = j.at("psi0").get<std::vector<double>>();
        Field1D psi0 = Eigen::Map<const Eigen::ArrayXd>(v.data(), static_cast<Eigen::Index>(v.size()));
        return build_torus_model(n_x, psi0);
    }
    return build_torus_model(n_x);
}

std::uint64_t fnv1a64(const std::string& data)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t h)
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string model_hash(const FiberModel& model)
{
    return hash_hex(fnv1a64(model_descriptor(model).dump()));
}

void write_text_file(const std::filesystem::path& file, const std::string& content)
{
    std::ofstream os(file, std::ios::binary);
    if (!os)
        throw std::runtime_error("write_text_file: cannot open " + file.string());
    os << content;
}

std::string read_text_file(const std::filesystem::path& file)
{
    std::ifstream is(file, std::ios::binary);
    if (!is)
        throw std::runtime_error("read_text_file: cannot open " + file.string());
    std::string s((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return s;
}

} // namespace klab
