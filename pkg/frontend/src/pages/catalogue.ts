/** Catalogue 'Em: ten yes/no morphology questions and six seven-point
 * rating sliders for one creature. An untouched form is blocked before
 * any network call; a 400 from the service is shown inline. */

import { ApiClient, ApiError } from "../api.js";

export const MORPHOLOGY_FEATURES = [
  "has_head",
  "has_eyes",
  "has_mouth",
  "has_nose",
  "has_legs",
  "has_hair",
  "has_scales",
  "has_feathers",
  "lives_underwater",
  "bigger_than_housecat",
] as const;

export const RATING_METRICS = [
  "compassion",
  "empathy",
  "cute",
  "memorable",
  "realistic",
  "creepy",
] as const;

export type Feature = (typeof MORPHOLOGY_FEATURES)[number];
export type Metric = (typeof RATING_METRICS)[number];

export interface CatalogueState {
  userId: string;
  ganimalId: string;
  toggles: Record<Feature, boolean | null>;
  sliders: Record<Metric, number | null>;
  inlineError: string | null;
  toast: string | null;
}

function blankToggles(): Record<Feature, boolean | null> {
  return Object.fromEntries(
    MORPHOLOGY_FEATURES.map((f) => [f, null]),
  ) as Record<Feature, boolean | null>;
}

function blankSliders(): Record<Metric, number | null> {
  return Object.fromEntries(
    RATING_METRICS.map((m) => [m, null]),
  ) as Record<Metric, number | null>;
}

export class CataloguePage {
  readonly state: CatalogueState;

  constructor(private readonly api: ApiClient, userId: string, ganimalId: string) {
    this.state = {
      userId,
      ganimalId,
      toggles: blankToggles(),
      sliders: blankSliders(),
      inlineError: null,
      toast: null,
    };
  }

  setToggle(feature: Feature, value: boolean): void {
    if (!(feature in this.state.toggles)) {
      throw new RangeError(`unknown morphology feature ${feature}`);
    }
    this.state.toggles[feature] = value;
  }

  setSlider(metric: Metric, value: number): void {
    if (!(metric in this.state.sliders)) {
      throw new RangeError(`unknown rating metric ${metric}`);
    }
    if (!Number.isInteger(value) || value < 1 || value > 7) {
      throw new RangeError(`rating must be an integer 1..7, got ${value}`);
    }
    this.state.sliders[metric] = value;
  }

  /** Post the answered questions; returns true on success. An empty form
   * never reaches the network. */
  async submit(): Promise<boolean> {
    const morphology = Object.fromEntries(
      Object.entries(this.state.toggles).filter(([, v]) => v !== null),
    ) as Record<string, boolean>;
    const ratings = Object.fromEntries(
      Object.entries(this.state.sliders).filter(([, v]) => v !== null),
    ) as Record<string, number>;
    if (Object.keys(morphology).length === 0 && Object.keys(ratings).length === 0) {
      this.state.inlineError = "answer at least one question before submitting";
      this.state.toast = null;
      return false;
    }
    try {
      await this.api.annotate(
        this.state.userId,
        this.state.ganimalId,
        Object.keys(morphology).length ? morphology : undefined,
        Object.keys(ratings).length ? ratings : undefined,
      );
    } catch (err) {
      if (err instanceof ApiError && err.status === 400) {
        this.state.inlineError = err.detail;
        this.state.toast = null;
        return false;
      }
      throw err;
    }
    this.state.inlineError = null;
    this.state.toast = "annotation saved";
    return true;
  }
}
