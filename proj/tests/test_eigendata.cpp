#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "twistl/eigendata.hpp"

using namespace twistl;

namespace {

// a_l = l - #{(x, y) mod l : y^2 + y = x^3 - x^2 - 10x - 20}
i64 point_count_trace(i64 l) {
    i64 n = 0;
    for (i64 x = 0; x < l; ++x)
        for (i64 y = 0; y < l; ++y)
            if (mod_floor(y * y + y - (x * x * x - x * x - 10 * x - 20), l) == 0) ++n;
    return l - n;
}

std::string exported(const std::vector<NewformEigendata>& forms) {
    std::ostringstream os;
    for (const auto& f : forms) export_eigendata(os, f);
    return os.str();
}

}  // namespace

TEST(Eigendata, Level11MatchesPointCounts) {
    const auto forms = newform_eigendata(11, 60);
    ASSERT_EQ(forms.size(), 1u);
    const auto& f = forms[0];
    EXPECT_TRUE(f.integral());
    EXPECT_EQ(f.a[2], -2.0);
    EXPECT_EQ(f.a[3], -1.0);
    EXPECT_EQ(f.a[5], 1.0);
    for (const i64 l : primes_up_to(50)) EXPECT_EQ(f.a[static_cast<std::size_t>(l)], double(point_count_trace(l))) << l;
    EXPECT_EQ(f.fricke_sign, -1);
}

TEST(Eigendata, Normalisation) {
    const auto f = newform_eigendata(11, 60)[0];
    EXPECT_EQ(f(1), 1.0);
    EXPECT_NEAR(f(11), f.a[11] / std::sqrt(11.0), 1e-15);
    EXPECT_NEAR(std::abs(f(11)), 1.0 / std::sqrt(11.0), 1e-8);
    EXPECT_NEAR(f(2), -2.0 / std::sqrt(2.0), 1e-15);
    EXPECT_THROW(f(61), EigendataTooShort);
}

TEST(Eigendata, Level23GoldenRatio) {
    const auto forms = newform_eigendata(23, 40);
    ASSERT_EQ(forms.size(), 2u);
    const double s5 = std::sqrt(5.0);
    EXPECT_NEAR(forms[0].a[2], (-1.0 - s5) / 2.0, 1e-9);
    EXPECT_NEAR(forms[1].a[2], (-1.0 + s5) / 2.0, 1e-9);
    EXPECT_FALSE(forms[0].integral());
}

TEST(Eigendata, Level37TwoRationalForms) {
    const auto forms = newform_eigendata(37, 40);
    ASSERT_EQ(forms.size(), 2u);
    // 37a has rank one (Atkin-Lehner +1), 37b rank zero
    EXPECT_EQ(forms[0].a[2], -2.0);
    EXPECT_EQ(forms[0].a[3], -3.0);
    EXPECT_EQ(forms[0].a[37], -1.0);
    EXPECT_EQ(forms[0].fricke_sign, 1);
    EXPECT_EQ(forms[1].a[2], 0.0);
    EXPECT_EQ(forms[1].a[3], 1.0);
    EXPECT_EQ(forms[1].a[37], 1.0);
    EXPECT_EQ(forms[1].fricke_sign, -1);
}

TEST(Eigendata, ShortRangeBelowLevel) {
    const auto forms = newform_eigendata(43, 30);
    ASSERT_EQ(forms.size(), 3u);
    for (const auto& f : forms) EXPECT_EQ(f.n_max(), 30);
}

TEST(Eigendata, TraceMatchesHecke) {
    for (const i64 q : {23, 43, 59}) {
        const auto s = build_space(q);
        const auto forms = newform_eigendata(s, 40);
        for (const i64 n : {2, 3, 4, 6, 9, 10}) EXPECT_LT(trace_discrepancy(s, forms, n), 1e-8) << q << " " << n;
    }
}

TEST(Eigendata, BatteriesPass) {
    for (const i64 q : {11, 23, 37})
        for (const auto& f : newform_eigendata(q, 2000)) EXPECT_NO_THROW(validate(f));
}

TEST(Eigendata, RejectsBadRange) {
    EXPECT_THROW(newform_eigendata(11, 10), DomainError);
    EXPECT_THROW(newform_eigendata(13, 40), EmptySpace);
}

TEST(EigendataIO, RoundTripIsByteIdentical) {
    for (const i64 q : {11, 23}) {
        const auto forms = newform_eigendata(q, 50);
        const std::string text = exported(forms);
        std::istringstream is(text);
        const auto back = ingest_eigendata(is);
        ASSERT_EQ(back.size(), forms.size());
        EXPECT_EQ(exported(back), text);
        for (const auto& f : back) EXPECT_EQ(f.provenance, Provenance::ingested);
    }
}

TEST(EigendataIO, CorruptedMultiplicativity) {
    std::string text = exported(newform_eigendata(11, 40));
    const auto pos = text.find("\n6,");
    ASSERT_NE(pos, std::string::npos);
    const auto end = text.find('\n', pos + 1);
    text.replace(pos, end - pos, "\n6,3");
    std::istringstream is(text);
    try {
        ingest_eigendata(is);
        FAIL() << "expected InvariantViolation";
    } catch (const InvariantViolation& e) {
        EXPECT_EQ(e.invariant(), "multiplicativity");
        EXPECT_EQ(e.index(), 6);
    }
}

TEST(EigendataIO, FormatErrors) {
    const std::string header = "# level=11 weight=2 form=0 fricke=-1\n";
    std::istringstream missing_one(header + "2,-2\n3,-1\n");
    EXPECT_THROW(ingest_eigendata(missing_one), FormatError);
    std::istringstream gap(header + "1,1\n2,-2\n4,2\n");
    EXPECT_THROW(ingest_eigendata(gap), FormatError);
    std::istringstream no_header("1,1\n2,-2\n");
    EXPECT_THROW(ingest_eigendata(no_header), FormatError);
    std::istringstream junk(header + "1,1\n2,abc\n");
    EXPECT_THROW(ingest_eigendata(junk), FormatError);
    std::istringstream empty("");
    EXPECT_THROW(ingest_eigendata(empty), FormatError);
}

TEST(EigendataIO, FrickeSignChecked) {
    std::string text = exported(newform_eigendata(11, 40));
    text.replace(text.find("fricke=-1"), 9, "fricke=+1");
    std::istringstream is(text);
    EXPECT_THROW(ingest_eigendata(is), InvariantViolation);
}

TEST(EigendataIO, DeligneBound) {
    std::string text = exported(newform_eigendata(11, 40));
    const auto pos = text.find("\n7,");
    const auto end = text.find('\n', pos + 1);
    text.replace(pos, end - pos, "\n7,9");
    std::istringstream is(text);
    try {
        ingest_eigendata(is);
        FAIL() << "expected InvariantViolation";
    } catch (const InvariantViolation& e) {
        EXPECT_EQ(e.invariant(), "deligne");
        EXPECT_EQ(e.index(), 7);
    }
}
