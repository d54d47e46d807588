import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from socialdist.errors import DegeneratePair, InvalidPixel, NoUsableKeypoints
from socialdist.geometry import (
    BodyPart,
    BodyProportion,
    CameraIntrinsics,
    SensorPoint,
    SkeletonObservation,
    WorldPoint,
    back_project,
    estimate_depth,
    estimate_person,
    image_pair_distance,
    pairwise_distance,
    pixel_to_sensor,
    sensor_to_pixel,
)

from conftest import keypoints_for_person, oracle_image_length, oracle_project


def make_cam(f=50.0, sw=36.0, sh=24.0, w=4180, h=2768):
    return CameraIntrinsics(f, sw, sh, w, h)


class TestPixelToSensor:
    def test_center_maps_to_origin(self):
        s = pixel_to_sensor((2090, 1384), make_cam())
        assert s == SensorPoint(0.0, 0.0)

    def test_top_left_maps_to_sensor_corner(self):
        s = pixel_to_sensor((0, 0), make_cam())
        assert s == SensorPoint(-18.0, 12.0)

    def test_quarter_width_offset_scales_linearly(self):
        s = pixel_to_sensor((3135, 1384), make_cam())
        assert s == SensorPoint(9.0, 0.0)

    @pytest.mark.parametrize("pixel", [(-1, 0), (0, -1), (4180, 0), (0, 2768)])
    def test_out_of_bounds_rejected(self, pixel):
        with pytest.raises(InvalidPixel):
            pixel_to_sensor(pixel, make_cam())

    @given(u=st.floats(0, 4179.999), v=st.floats(0, 2767.999))
    def test_in_image_points_stay_on_sensor(self, u, v):
        cam = make_cam()
        s = pixel_to_sensor((u, v), cam)
        eps = 1e-9
        assert abs(s.x_a) <= cam.sensor_width / 2 + eps
        assert abs(s.y_a) <= cam.sensor_height / 2 + eps

    @given(u=st.floats(0, 4179.999), v=st.floats(0, 2767.999))
    def test_round_trips_with_sensor_to_pixel(self, u, v):
        cam = make_cam()
        u2, v2 = sensor_to_pixel(pixel_to_sensor((u, v), cam), cam)
        assert math.isclose(u, u2, abs_tol=1e-6)
        assert math.isclose(v, v2, abs_tol=1e-6)


class TestImagePairDistance:
    def test_three_four_five(self):
        assert image_pair_distance(SensorPoint(0, 0), SensorPoint(3, 4)) == 5.0

    def test_identical_points(self):
        assert image_pair_distance(SensorPoint(1.5, -2), SensorPoint(1.5, -2)) == 0.0

    def test_translation_invariance(self):
        assert image_pair_distance(SensorPoint(-1, 2), SensorPoint(2, -2)) == 5.0


class TestEstimateDepth:
    def test_torso_at_three_meters(self):
        # Forward oracle: a 444 mm sensor-parallel segment at 3000 mm
        # through a 50 mm pinhole images at 7.4 mm.
        assert oracle_image_length(444.0, 3000.0, 50.0) == pytest.approx(7.4)
        d = estimate_depth(7.4, make_cam(50), BodyProportion(BodyPart.TORSO, 444.0))
        assert d == pytest.approx(3000.0)

    def test_unit_similarity_ratio(self):
        cam = make_cam(50)
        d = estimate_depth(50.0, cam, BodyProportion(BodyPart.SHOULDERS, 389.0))
        assert d == 389.0

    def test_pupils_at_thirty_meters(self):
        assert oracle_image_length(63.0, 30000.0, 300.0) == pytest.approx(0.63)
        d = estimate_depth(0.63, make_cam(300), BodyProportion(BodyPart.PUPILS, 63.0))
        assert d == pytest.approx(30000.0)

    @pytest.mark.parametrize("bad", [0.0, -1.0])
    def test_degenerate_pair(self, bad):
        with pytest.raises(DegeneratePair):
            estimate_depth(bad, make_cam(), BodyProportion(BodyPart.TORSO, 444.0))

    @given(d_image=st.floats(0.01, 30.0), f=st.floats(16, 300),
           k=st.floats(0.1, 10.0))
    def test_scale_invariance(self, d_image, f, k):
        prop = BodyProportion(BodyPart.TORSO, 444.0)
        d1 = estimate_depth(d_image, make_cam(f), prop)
        d2 = estimate_depth(k * d_image, make_cam(k * f), prop)
        assert d2 == pytest.approx(d1, rel=1e-12)


class TestBackProject:
    def test_optical_axis(self):
        w = back_project(SensorPoint(0, 0), 2500.0, make_cam())
        assert (w.x, w.y, w.z) == (0.0, -0.0, -2500.0)

    def test_direct_arithmetic(self):
        w = back_project(SensorPoint(9, 0), 3000.0, make_cam(50))
        assert (w.x, w.y, w.z) == (-540.0, -0.0, -3000.0)

    def test_round_trip_against_forward_oracle(self):
        cam = make_cam(50)
        u, v = oracle_project((-540.0, 0.0, -3000.0), cam)
        s = pixel_to_sensor((u, v), cam)
        assert s.x_a == pytest.approx(9.0, rel=1e-12)
        assert s.y_a == pytest.approx(0.0, abs=1e-12)

    @given(x=st.floats(-2000, 2000), y=st.floats(-1200, 1200),
           depth=st.floats(500, 50000))
    @settings(max_examples=200)
    def test_identity_on_world_points(self, x, y, depth):
        # keep the point inside the frustum so the pixel stays in frame
        cam = make_cam(50)
        x = x * depth / 10000.0
        y = y * depth / 10000.0
        u, v = oracle_project((x, y, -depth), cam)
        w = back_project(pixel_to_sensor((u, v), cam), depth, cam)
        assert w.x == pytest.approx(x, rel=1e-12, abs=1e-9)
        assert w.y == pytest.approx(y, rel=1e-12, abs=1e-9)
        assert w.z == -depth


class TestPairwiseDistance:
    def test_identity(self):
        p = WorldPoint(0, 0, -2000)
        assert pairwise_distance(p, p) == 0.0

    def test_axis_aligned(self):
        assert pairwise_distance(WorldPoint(0, 0, -2000),
                                 WorldPoint(1500, 0, -2000)) == 1500.0

    def test_three_four_five(self):
        assert pairwise_distance(WorldPoint(300, 400, -1200),
                                 WorldPoint(0, 0, -1200)) == 500.0

    coords = st.floats(-1e5, 1e5, allow_subnormal=False)

    @given(ax=coords, ay=coords, az=coords, bx=coords, by=coords, bz=coords,
           cx=coords, cy=coords, cz=coords)
    @settings(max_examples=200)
    def test_metric_properties(self, ax, ay, az, bx, by, bz, cx, cy, cz):
        a, b, c = WorldPoint(ax, ay, az), WorldPoint(bx, by, bz), WorldPoint(cx, cy, cz)
        assert pairwise_distance(a, b) == pairwise_distance(b, a) >= 0.0
        if (ax, ay, az) == (bx, by, bz):
            assert pairwise_distance(a, b) == 0.0
        elif max(abs(ax - bx), abs(ay - by), abs(az - bz)) > 1e-6:
            assert pairwise_distance(a, b) > 0.0
        assert pairwise_distance(a, c) <= \
            pairwise_distance(a, b) + pairwise_distance(b, c) + 1e-6


class TestEstimatePerson:
    def test_parallel_person_all_parts_agree(self, cam50):
        kps = keypoints_for_person((200.0, -150.0, -3000.0), cam50)
        est = estimate_person(SkeletonObservation(kps), cam50)
        for part in BodyPart:
            assert est.depth_of(part) == pytest.approx(3000.0, rel=1e-12)
        assert est.location.depth == pytest.approx(3000.0, rel=1e-12)
        assert est.chosen_part == BodyPart.TORSO
        assert set(est.anchors) == {"Eyes", "Shoulder", "Torso"}

    def test_rotated_person_prefers_torso(self, cam50):
        kps = keypoints_for_person((0.0, 0.0, -3000.0), cam50, theta_deg=30.0)
        est = estimate_person(SkeletonObservation(kps), cam50)
        expected = 3000.0 / math.cos(math.radians(30.0))
        assert est.depth_of(BodyPart.SHOULDERS) == pytest.approx(expected, rel=1e-9)
        assert est.depth_of(BodyPart.PUPILS) == pytest.approx(expected, rel=1e-9)
        assert est.depth_of(BodyPart.TORSO) == pytest.approx(3000.0, rel=1e-12)
        assert est.chosen_part == BodyPart.TORSO
        assert est.depth_of(BodyPart.SHOULDERS) == pytest.approx(3464.1016, abs=1e-3)

    def test_close_up_pupils_only(self, cam50):
        # center the face on the optical axis; the torso would be out of frame
        kps = keypoints_for_person((0.0, -452.0, -900.0), cam50, parts=("pupils",))
        est = estimate_person(SkeletonObservation(kps), cam50)
        assert est.chosen_part == BodyPart.PUPILS
        assert est.location.depth == pytest.approx(900.0, rel=1e-12)
        assert list(est.anchors) == ["Eyes"]

    def test_no_usable_pair(self, cam50):
        empty = SkeletonObservation(((0.0, 0.0, 0.0),) * 25)
        with pytest.raises(NoUsableKeypoints):
            estimate_person(empty, cam50)

    def test_low_confidence_pair_skipped(self, cam50):
        kps = list(keypoints_for_person((0, 0, -2000.0), cam50))
        for idx in (1, 8, 2, 5):  # knock out torso and shoulders
            u, v, _ = kps[idx]
            kps[idx] = (u, v, 0.05)
        est = estimate_person(SkeletonObservation(tuple(kps)), cam50)
        assert est.chosen_part == BodyPart.PUPILS

    def test_single_visible_shoulder_becomes_anchor_only(self, cam50):
        kps = list(keypoints_for_person((0, 0, -2000.0), cam50))
        u, v, _ = kps[5]
        kps[5] = (u, v, 0.0)
        est = estimate_person(SkeletonObservation(tuple(kps)), cam50)
        assert "Shoulder" in est.anchors
        ranged = {part for part, _ in est.per_part_estimates}
        assert BodyPart.SHOULDERS not in ranged

    @given(theta=st.floats(0.0, 89.0), depth=st.floats(1500, 20000))
    @settings(max_examples=150)
    def test_selection_dominance(self, theta, depth):
        cam = make_cam()
        kps = keypoints_for_person((0.0, 0.0, -depth), cam, theta_deg=theta)
        est = estimate_person(SkeletonObservation(kps), cam)
        chosen = est.location.depth
        for _, w in est.per_part_estimates:
            assert chosen <= w.depth * (1 + 1e-9)

    @given(theta=st.floats(1.0, 89.0))
    @settings(max_examples=100)
    def test_rotation_overestimates_by_inverse_cosine(self, theta):
        cam = make_cam()
        kps = keypoints_for_person((0.0, 0.0, -3000.0), cam, theta_deg=theta,
                                   parts=("shoulders",))
        est = estimate_person(SkeletonObservation(kps), cam)
        expected = 3000.0 / math.cos(math.radians(theta))
        assert est.location.depth == pytest.approx(expected, rel=1e-9)
        assert est.location.depth >= 3000.0
