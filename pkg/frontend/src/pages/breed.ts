/** Breed: pick two first-generation creatures from the world, name the
 * child, and land on its permalink. Anything past G1 is listed but
 * disabled with a tooltip; service rejections (identical parents, wrong
 * generation, foreign world) surface as a validation message. */

import { ApiClient, ApiError, GanimalPayload } from "../api.js";

export interface BreedCandidate {
  ganimalId: string;
  name: string | null;
  generation: string;
  imageUri: string;
  disabled: boolean;
  tooltip: string | null;
}

export interface BreedState {
  userId: string;
  candidates: BreedCandidate[];
  parentA: string | null;
  parentB: string | null;
  childName: string;
  validationMessage: string | null;
  child: GanimalPayload | null;
  navigatedTo: string | null;
}

export class BreedPage {
  readonly state: BreedState;

  constructor(private readonly api: ApiClient, userId: string) {
    this.state = {
      userId,
      candidates: [],
      parentA: null,
      parentB: null,
      childName: "",
      validationMessage: null,
      child: null,
      navigatedTo: null,
    };
  }

  async load(): Promise<void> {
    const world = await this.api.world(this.state.userId);
    this.state.candidates = world.population.map((entry) => {
      const breedable = entry.generation === "G1";
      return {
        ganimalId: entry.ganimal_id,
        name: entry.name,
        generation: entry.generation,
        imageUri: entry.image_uri,
        disabled: !breedable,
        tooltip: breedable ? null : "only first-generation ganimals can breed",
      };
    });
  }

  /** Toggle a candidate into the parent slots; disabled rows are inert.
   * Returns whether the click changed anything. */
  select(ganimalId: string): boolean {
    const candidate = this.state.candidates.find((c) => c.ganimalId === ganimalId);
    if (!candidate || candidate.disabled) return false;
    if (this.state.parentA === ganimalId) {
      this.state.parentA = null;
    } else if (this.state.parentB === ganimalId) {
      this.state.parentB = null;
    } else if (this.state.parentA === null) {
      this.state.parentA = ganimalId;
    } else if (this.state.parentB === null) {
      this.state.parentB = ganimalId;
    } else {
      this.state.parentB = ganimalId;
    }
    return true;
  }

  setName(name: string): void {
    this.state.childName = name;
  }

  async submit(): Promise<GanimalPayload | null> {
    const { parentA, parentB } = this.state;
    if (!parentA || !parentB) {
      this.state.validationMessage = "pick two parents first";
      return null;
    }
    try {
      const child = await this.api.breed(
        this.state.userId,
        parentA,
        parentB,
        this.state.childName || undefined,
      );
      this.state.child = child;
      this.state.navigatedTo = child.permalink;
      this.state.validationMessage = null;
      return child;
    } catch (err) {
      if (err instanceof ApiError && [403, 409, 422].includes(err.status)) {
        this.state.validationMessage = err.detail;
        return null;
      }
      throw err;
    }
  }
}
