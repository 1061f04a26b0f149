# Copyright (C) 2026 The imitator developers
#
# This file is free software; you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.

"""
Command-line interface.

Each subcommand wraps one library operation.  Exit status is 0 on
success, 2 when an input fails validation and 3 on file errors.
"""

import argparse
import dataclasses
import json
import logging
import os
import sys

import numpy as np

from imitator import utils
from imitator.body import AvatarConfig, build_canonical_humanoid
from imitator.context import Context, PipelineConfig
from imitator.corpus import PRESETS, CorpusSpec, generate_corpus
from imitator.metrics import evaluate_sequence
from imitator.motion import IMAGE_PROTOCOL, VIDEO_PROTOCOL, OrbitProtocol, \
    load_pose_sequence, make_training_pairs
from imitator.pipeline import run, write_outputs
from imitator.raster import Camera, Intrinsics, framed_orbit, \
    render_turntable
from imitator.texture import InpaintOptions, TextureMap, VisibilityMask, \
    build_atlas_index, compute_visibility_mask, extract_partial_texture, \
    inpaint_texture
from imitator.types import ValidationError

log = logging.getLogger(__name__)

EXIT_VALIDATION = 2
EXIT_IO = 3


def _color(text):
    """Parse an r,g,b triple.

    >>> _color('10,20,30')
    (10, 20, 30)
    """
    try:
        rgb = tuple(int(c) for c in text.split(','))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f'bad colour {text!r}') from exc
    if len(rgb) != 3 or not all(0 <= c <= 255 for c in rgb):
        raise argparse.ArgumentTypeError(f'bad colour {text!r}')
    return rgb


def _model(args):
    """Return the humanoid, customised by --avatar if given."""
    if getattr(args, 'avatar', None):
        return build_canonical_humanoid(AvatarConfig.load(args.avatar))
    return build_canonical_humanoid()


def _pose(path, frame):
    poses = load_pose_sequence(path)
    if not 0 <= frame < len(poses):
        raise ValidationError(f'{path}: no frame {frame} '
                              f'({len(poses)} frames)')
    return poses[frame]


def _frame_files(directory):
    return sorted(name for name in os.listdir(directory)
                  if name.endswith('.png'))


def _pipeline_config(args):
    config = PipelineConfig.load(args.config) if args.config \
        else PipelineConfig()
    return config.override(seed=args.seed, out_dir=args.out,
                           texture_resolution=args.resolution,
                           clip_length=args.clip_length,
                           background=args.background)


def extract(args, config):
    """Stage-1 extraction: write the partial texture and its mask."""
    model = _model(args)
    camera = Camera.load(args.camera)
    image = utils.read_png(args.image)
    partial, mask = extract_partial_texture(
        image, model, _pose(args.pose, args.frame), camera,
        config.texture_resolution, config.visibility)
    partial.save(os.path.join(config.out_dir, 'partial.png'))
    mask.save(os.path.join(config.out_dir, 'mask.png'))
    atlas = build_atlas_index(model, config.texture_resolution)
    print(f'texture coverage: {mask.coverage(atlas) * 100:.1f}%')


def inpaint(args, config):
    """Stage-1 completion: inpaint a partial texture."""
    partial = TextureMap.load(args.partial)
    mask = VisibilityMask.load(args.mask)
    options = InpaintOptions.load(args.options) if args.options \
        else config.inpaint
    if args.no_mirror:
        options = dataclasses.replace(options, mirror=False)
    atlas = None if args.plain else \
        build_atlas_index(_model(args), partial.resolution)
    complete = inpaint_texture(partial, mask, options, atlas)
    complete.save(os.path.join(config.out_dir, 'texture.png'))


def imitate(args, config):
    """Run both stages and write the rendered sequence."""
    context = Context(config, _model(args))
    context.verbose = args.verbose
    camera = Camera.load(args.camera)
    cameras = None
    if args.actor_camera:
        cameras = Camera.load(args.actor_camera)
    run(context, utils.read_png(args.image), _pose(args.pose, args.frame),
        camera, load_pose_sequence(args.actor), cameras)
    write_outputs(context, config.out_dir, args.contact_sheet)
    print(context)


def evaluate(args, config):
    """Score a directory of predicted frames against ground truth."""
    pred_names = set(_frame_files(args.pred))
    gt_names = set(_frame_files(args.gt))
    missing = sorted(pred_names ^ gt_names)
    if missing:
        raise ValidationError(f'unpaired frames: {", ".join(missing)}')
    if not gt_names:
        raise ValidationError(f'no PNG frames in {args.gt}')
    names = sorted(gt_names)
    pred = [utils.read_png(os.path.join(args.pred, n)) for n in names]
    gt = [utils.read_png(os.path.join(args.gt, n)) for n in names]
    pred_vertices = gt_vertices = None
    if args.pred_vertices or args.gt_vertices:
        if not (args.pred_vertices and args.gt_vertices):
            raise ValidationError('both vertex streams are needed')
        pred_vertices = np.load(args.pred_vertices)
        gt_vertices = np.load(args.gt_vertices)
    report = evaluate_sequence(pred, gt, pred_vertices, gt_vertices)
    utils.write_json(os.path.join(config.out_dir, 'metrics.json'),
                     report.to_dict())
    print(report.table())


def make_pairs(args, config):
    """Build (intermediate, target) training pairs from a video."""
    names = _frame_files(args.video)
    if not names:
        raise ValidationError(f'no PNG frames in {args.video}')
    video = [utils.read_png(os.path.join(args.video, n)) for n in names]
    pairs = make_training_pairs(
        _model(args), video, load_pose_sequence(args.pose),
        Camera.load(args.camera), config.texture_resolution, config.inpaint,
        config.visibility, config.background)
    manifest = []
    for pair in pairs:
        inter = utils.frame_name(pair.frame_index + 1, prefix='inter')
        target = utils.frame_name(pair.frame_index + 1, prefix='target')
        utils.write_png(os.path.join(config.out_dir, inter),
                        pair.intermediate)
        utils.write_png(os.path.join(config.out_dir, target), pair.target)
        manifest.append({'frame_index': pair.frame_index,
                         'intermediate': inter, 'target': target,
                         'source': names[pair.frame_index]})
    utils.write_json(os.path.join(config.out_dir, 'pairs.json'),
                     {'pairs': manifest})
    print(f'{len(pairs)} training pairs')


def gen_corpus(args, config):
    """Generate a synthetic rendered corpus."""
    spec = CorpusSpec.load(args.spec) if args.spec \
        else CorpusSpec(seed=config.seed)
    changes = {'n_avatars': args.avatars, 'n_frames': args.frames,
               'resolution': args.image_size,
               'texture_resolution': args.resolution, 'seed': args.seed}
    if args.motions:
        changes['motions'] = tuple(args.motions.split(','))
    if args.views:
        changes['views'] = OrbitProtocol(0.0, 360.0 / args.views, args.views)
    spec = dataclasses.replace(
        spec, **{k: v for k, v in changes.items() if v is not None})
    manifest = generate_corpus(spec, config.out_dir)
    print(f"{len(manifest['avatars'])} avatars written to {config.out_dir}")


def orbit(args, config):
    """Render a textured pose from each camera of an orbit protocol."""
    model = _model(args)
    pose = _pose(args.pose, args.frame)
    texture = TextureMap.load(args.texture)
    protocol = {'image': IMAGE_PROTOCOL, 'video': VIDEO_PROTOCOL,
                'config': config.orbit}[args.protocol]
    cameras = framed_orbit(model, pose, protocol.azimuths(),
                           Intrinsics.from_config())
    atlas = build_atlas_index(model, texture.resolution)
    frames = render_turntable(model, pose, texture, cameras,
                              config.background, atlas.mapped)
    for num, frame in enumerate(frames):
        utils.write_png(os.path.join(config.out_dir,
                                     utils.frame_name(num + 1)),
                        frame.color)
    union = None
    for camera in cameras:
        mask = compute_visibility_mask(model, pose, camera,
                                       texture.resolution, config.visibility)
        union = mask if union is None else union.union(mask)
    coverage = union.coverage(atlas)
    utils.write_json(os.path.join(config.out_dir, 'orbit.json'),
                     {'azimuths_deg': protocol.azimuths(),
                      'cameras': [c.to_dict() for c in cameras],
                      'coverage': coverage})
    print(f'{len(frames)} views, union coverage {coverage * 100:.1f}%')


COMMANDS = {'extract': extract, 'inpaint': inpaint, 'imitate': imitate,
            'evaluate': evaluate, 'make-pairs': make_pairs,
            'gen-corpus': gen_corpus, 'orbit': orbit}


def _add_pose_args(parser):
    parser.add_argument('--pose', required=True, metavar='JSON',
                        help='pose sequence file')
    parser.add_argument('--frame', type=int, default=0,
                        help='frame of the pose sequence [default: 0]')


def build_parser():
    """Return the argument parser."""
    parser = argparse.ArgumentParser(
        prog='imitate', description='Two-stage human motion imitation.')
    parser.add_argument('--config', metavar='JSON',
                        help='pipeline configuration file')
    parser.add_argument('--seed', type=int, help='random seed')
    parser.add_argument('--out', metavar='DIR', help='output directory')
    parser.add_argument('--resolution', type=int,
                        help='texture resolution in texels')
    parser.add_argument('--clip-length', type=int,
                        help='frames per generated clip')
    parser.add_argument('--background', type=_color, metavar='R,G,B',
                        help='background colour')
    parser.add_argument('-v', '--verbose', action='store_true',
                        help='log debugging messages')
    sub = parser.add_subparsers(dest='command', required=True)

    cmd = sub.add_parser('extract', help=extract.__doc__)
    cmd.add_argument('--image', required=True, help='imitator photo (PNG)')
    _add_pose_args(cmd)
    cmd.add_argument('--camera', required=True, metavar='JSON')
    cmd.add_argument('--avatar', metavar='JSON', help='avatar proportions')

    cmd = sub.add_parser('inpaint', help=inpaint.__doc__)
    cmd.add_argument('--partial', required=True, help='partial texture PNG')
    cmd.add_argument('--mask', required=True, help='visibility mask PNG')
    cmd.add_argument('--options', metavar='JSON', help='inpaint options')
    cmd.add_argument('--plain', action='store_true',
                     help='treat the map as one plain grid (no atlas)')
    cmd.add_argument('--no-mirror', action='store_true',
                     help='disable the left/right mirror prior')
    cmd.add_argument('--avatar', metavar='JSON', help='avatar proportions')

    cmd = sub.add_parser('imitate', help=imitate.__doc__)
    cmd.add_argument('--image', required=True, help='imitator photo (PNG)')
    _add_pose_args(cmd)
    cmd.add_argument('--camera', required=True, metavar='JSON')
    cmd.add_argument('--actor', required=True, metavar='JSON',
                     help='actor pose sequence')
    cmd.add_argument('--actor-camera', metavar='JSON',
                     help='render camera [default: --camera]')
    cmd.add_argument('--contact-sheet', action='store_true',
                     help='also write a contact sheet of all frames')
    cmd.add_argument('--avatar', metavar='JSON', help='avatar proportions')

    cmd = sub.add_parser('evaluate', help=evaluate.__doc__)
    cmd.add_argument('--pred', required=True, metavar='DIR')
    cmd.add_argument('--gt', required=True, metavar='DIR')
    cmd.add_argument('--pred-vertices', metavar='NPY')
    cmd.add_argument('--gt-vertices', metavar='NPY')

    cmd = sub.add_parser('make-pairs', help=make_pairs.__doc__)
    cmd.add_argument('--video', required=True, metavar='DIR',
                     help='directory of video frames (PNG)')
    cmd.add_argument('--pose', required=True, metavar='JSON',
                     help='per-frame poses of the video')
    cmd.add_argument('--camera', required=True, metavar='JSON')
    cmd.add_argument('--avatar', metavar='JSON', help='avatar proportions')

    cmd = sub.add_parser('gen-corpus', help=gen_corpus.__doc__)
    cmd.add_argument('--spec', metavar='JSON', help='corpus description')
    cmd.add_argument('--avatars', type=int, help='number of avatars')
    cmd.add_argument('--motions', help='comma-separated presets from ' +
                     ', '.join(PRESETS))
    cmd.add_argument('--frames', type=int, help='frames per motion')
    cmd.add_argument('--views', type=int, help='evenly spaced views')
    cmd.add_argument('--image-size', type=int, help='rendered image size')

    cmd = sub.add_parser('orbit', help=orbit.__doc__)
    _add_pose_args(cmd)
    cmd.add_argument('--texture', required=True, help='texture PNG')
    cmd.add_argument('--protocol', choices=['image', 'video', 'config'],
                     default='config',
                     help='azimuth protocol [default: config]')
    cmd.add_argument('--avatar', metavar='JSON', help='avatar proportions')
    return parser


def main(argv=None):
    """Run the command line; return the exit status."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(format='%(levelname)s %(name)s: %(message)s')
    logging.getLogger('imitator').setLevel(
        logging.DEBUG if args.verbose else logging.WARNING)
    try:
        config = _pipeline_config(args)
        COMMANDS[args.command](args, config)
    except (ValidationError, json.JSONDecodeError) as exc:
        message = str(exc).replace('\n', ' ')
        print(f'imitate {args.command}: {message}', file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f'imitate {args.command}: {exc}', file=sys.stderr)
        return EXIT_IO
    return 0
