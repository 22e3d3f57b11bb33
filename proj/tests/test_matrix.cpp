#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "kbfresh/error.hpp"
#include "kbfresh/matrix.hpp"

using namespace kbfresh;

TEST_CASE("matmul agrees with a hand-multiplied example") {
    const Mat a = Mat::from_rows({{1, 2, 3}, {4, 5, 6}});
    const Mat b = Mat::from_rows({{7, 8}, {9, 10}, {11, 12}});
    const Mat c = matmul(a, b);
    REQUIRE(c.rows() == 2);
    REQUIRE(c.cols() == 2);
    CHECK(c(0, 0) == 58);
    CHECK(c(0, 1) == 64);
    CHECK(c(1, 0) == 139);
    CHECK(c(1, 1) == 154);
}

TEST_CASE("transposed products match explicit transposition") {
    const Mat a = Mat::from_rows({{1, 2}, {3, 4}, {5, 6}});
    const Mat b = Mat::from_rows({{7, 8}, {9, 10}, {11, 12}});

    // a^T b: 2x3 * 3x2
    const Mat atb = matmul_at_b(a, b);
    REQUIRE(atb.rows() == 2);
    REQUIRE(atb.cols() == 2);
    CHECK(atb(0, 0) == 1 * 7 + 3 * 9 + 5 * 11);
    CHECK(atb(1, 1) == 2 * 8 + 4 * 10 + 6 * 12);

    // a b^T: 3x2 * 2x3
    const Mat abt = matmul_a_bt(a, b);
    REQUIRE(abt.rows() == 3);
    REQUIRE(abt.cols() == 3);
    CHECK(abt(0, 0) == 1 * 7 + 2 * 8);
    CHECK(abt(2, 1) == 5 * 9 + 6 * 10);
}

TEST_CASE("shape mismatches are internal errors") {
    const Mat a(2, 3);
    const Mat b(2, 3);
    CHECK_THROWS_AS(matmul(a, b), InternalError);
    CHECK_THROWS_AS(matmul_a_bt(a, Mat(2, 4)), InternalError);
    CHECK_THROWS_AS(matmul_at_b(a, Mat(3, 2)), InternalError);
    Mat c(2, 3);
    CHECK_THROWS_AS(c += Mat(3, 2), InternalError);
}

TEST_CASE("from_rows rejects ragged input") {
    CHECK_THROWS_AS(Mat::from_rows({{1, 2}, {3}}), InternalError);
}

TEST_CASE("relu and its backward mask by the activation sign") {
    const Mat m = Mat::from_rows({{-1.0, 0.0, 2.0}});
    const Mat r = relu(m);
    CHECK(r(0, 0) == 0.0);
    CHECK(r(0, 1) == 0.0);
    CHECK(r(0, 2) == 2.0);

    const Mat grad = Mat::from_rows({{5.0, 5.0, 5.0}});
    const Mat back = relu_backward(grad, r);
    CHECK(back(0, 0) == 0.0);
    CHECK(back(0, 1) == 0.0);  // zero activation blocks gradient
    CHECK(back(0, 2) == 5.0);
}

TEST_CASE("compound ops work elementwise") {
    Mat a = Mat::from_rows({{1, 2}});
    a += Mat::from_rows({{3, 4}});
    CHECK(a(0, 0) == 4);
    CHECK(a(0, 1) == 6);
    a -= Mat::from_rows({{1, 1}});
    CHECK(a(0, 0) == 3);
    a *= 2.0;
    CHECK(a(0, 0) == 6);
    CHECK(a(0, 1) == 10);
}
