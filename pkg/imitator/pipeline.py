# Copyright (C) 2017, 2019 Ben Elliston
# Copyright (C) 2026 The imitator developers
#
# This file is free software; you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.

"""The two-stage imitation pipeline."""

import logging
import os
import time

from imitator import utils
from imitator.motion import chunk_clips, render_imitation_sequence
from imitator.texture import build_atlas_index, complete_texture
from imitator.types import ValidationError

log = logging.getLogger(__name__)


class StageError(ValidationError):
    """A validation error raised inside a named pipeline stage."""

    def __init__(self, stage, cause):
        """Record the stage name and the underlying error."""
        super().__init__(f'{stage}: {cause}')
        self.stage = stage


def _stage1(context, image, pose, camera):
    """Extract and inpaint the imitator's texture (once per run)."""
    cfg = context.config
    complete, partial, mask = complete_texture(
        image, context.model, pose, camera, cfg.texture_resolution,
        cfg.inpaint, cfg.visibility)
    atlas = build_atlas_index(context.model, cfg.texture_resolution)
    context.texture, context.partial, context.mask = complete, partial, mask
    context.coverage = mask.coverage(atlas)
    context.stage1_runs += 1
    log.info('stage 1: %.1f%% of the atlas visible', 100 * context.coverage)


def _stage2(context, actor, cameras):
    """Render the completed texture at every actor pose."""
    cfg = context.config
    mapped = build_atlas_index(context.model, cfg.texture_resolution).mapped
    context.frames = render_imitation_sequence(
        context.model, context.texture, actor, cameras, cfg.background,
        mapped)
    context.schedule = chunk_clips(len(actor), cfg.clip_length)
    context.duration = actor.duration


def run(context, image, pose, camera, actor, cameras=None):
    """Run the pipeline: Stage-1 once, then Stage-2 for every frame.

    cameras defaults to the imitator's camera for every frame.
    """
    stages = (('stage1', lambda: _stage1(context, image, pose, camera)),
              ('stage2', lambda: _stage2(context, actor,
                                         camera if cameras is None
                                         else cameras)))
    for name, stage in stages:
        start = time.perf_counter()
        try:
            stage()
        except ValidationError as exc:
            raise StageError(name, exc) from exc
        context.add_timing(name, time.perf_counter() - start)
    return context.frames


def write_outputs(context, out_dir, contact_sheet=False):
    """Write frames, texture, mask, clip schedule and run summary."""
    frame_dir = os.path.join(out_dir, 'frames')
    for num, frame in enumerate(context.frames):
        utils.write_png(os.path.join(frame_dir, utils.frame_name(num + 1)),
                        frame.color)
    if context.texture is not None:
        context.texture.save(os.path.join(out_dir, 'texture.png'))
        context.partial.save(os.path.join(out_dir, 'partial.png'))
        context.mask.save(os.path.join(out_dir, 'mask.png'))
    if context.schedule is not None:
        utils.write_json(os.path.join(out_dir, 'schedule.json'),
                         context.schedule.to_dict())
    utils.write_json(os.path.join(out_dir, 'summary.json'),
                     context.summary())
    if contact_sheet and context.frames:
        utils.contact_sheet([f.color for f in context.frames],
                            os.path.join(out_dir, 'contact_sheet.png'),
                            titles=[str(n + 1) for n in
                                    range(len(context.frames))])
