/** Browser bootstrap: binds the four page view models to a minimal DOM.
 * All logic lives in the page modules; this file only renders state and
 * forwards clicks. Serve it from the same origin as the API. */

import { ApiClient } from "./api.js";
import { BreedPage } from "./pages/breed.js";
import { CataloguePage, MORPHOLOGY_FEATURES, RATING_METRICS } from "./pages/catalogue.js";
import { DiscoverPage } from "./pages/discover.js";
import { FeedPage } from "./pages/feed.js";

const POLL_MS = 4000;

function el(tag: string, text?: string, cls?: string): HTMLElement {
  const node = document.createElement(tag);
  if (text !== undefined) node.textContent = text;
  if (cls) node.className = cls;
  return node;
}

function button(label: string, onClick: () => void): HTMLElement {
  const b = el("button", label);
  b.addEventListener("click", onClick);
  return b;
}

function image(uri: string, size = 128): HTMLElement {
  const img = document.createElement("img");
  img.src = uri;
  img.width = size;
  img.height = size;
  img.style.imageRendering = "pixelated";
  return img;
}

function mount(root: HTMLElement, api: ApiClient, userId: string): void {
  const discover = new DiscoverPage(api, userId);
  const feed = new FeedPage(api, userId);
  const breed = new BreedPage(api, userId);

  const nav = el("nav");
  const view = el("main");
  root.append(nav, view);

  const renderDiscover = () => {
    view.replaceChildren(el("h2", "Discover 'Em"));
    const s = discover.state;
    if (s.retryBanner) {
      view.append(el("p", `backend unavailable: ${s.retryBanner}`, "banner"));
      view.append(button("retry", () => discover.retry().then(renderDiscover)));
      return;
    }
    if (!s.card) {
      view.append(el("p", s.loading ? "searching..." : "no creature yet"));
      return;
    }
    view.append(image(api.imageUrl(s.card.image.uri)));
    view.append(el("p", `${s.card.generation} · via ${s.card.procedure}`));
    view.append(button("keep", () => discover.keep().then(renderDiscover)));
    view.append(button("skip", () => discover.skip().then(renderDiscover)));
  };

  const renderFeed = () => {
    view.replaceChildren(el("h2", "Feed 'Em"));
    const spatial = feed.state.layoutVariant === "spatial";
    const board = el("div", undefined, spatial ? "scatter" : "list");
    if (spatial) board.style.position = "relative";
    for (const entry of feed.state.entries) {
      const card = el("div", undefined, "creature");
      card.append(image(api.imageUrl(entry.image_uri), 64));
      card.append(el("span", entry.name ?? entry.ganimal_id.slice(0, 8)));
      card.append(el("span", ` energy ${entry.energy}`, "energy"));
      card.append(
        button("feed", () => feed.feedOne(entry.ganimal_id).then(renderFeed)),
      );
      if (spatial && entry.position) {
        card.style.position = "absolute";
        card.style.left = `${Math.round(entry.position.x * 90)}%`;
        card.style.top = `${Math.round(entry.position.y * 90)}%`;
      }
      board.append(card);
    }
    view.append(board);
  };

  const renderCatalogue = () => {
    view.replaceChildren(el("h2", "Catalogue 'Em"));
    const target = feed.state.entries[0];
    if (!target) {
      view.append(el("p", "feed a creature first"));
      return;
    }
    const page = new CataloguePage(api, userId, target.ganimal_id);
    view.append(image(api.imageUrl(target.image_uri)));
    for (const feature of MORPHOLOGY_FEATURES) {
      const row = el("label", feature.replaceAll("_", " "));
      const box = document.createElement("input");
      box.type = "checkbox";
      box.addEventListener("change", () => page.setToggle(feature, box.checked));
      row.prepend(box);
      view.append(row);
    }
    for (const metric of RATING_METRICS) {
      const row = el("label", metric);
      const slider = document.createElement("input");
      slider.type = "range";
      slider.min = "1";
      slider.max = "7";
      slider.addEventListener("change", () =>
        page.setSlider(metric, Number(slider.value)),
      );
      row.prepend(slider);
      view.append(row);
    }
    const status = el("p", "", "status");
    view.append(
      button("submit", () =>
        page.submit().then(() => {
          status.textContent = page.state.toast ?? page.state.inlineError ?? "";
        }),
      ),
      status,
    );
  };

  const renderBreed = () => {
    view.replaceChildren(el("h2", "Breed"));
    const s = breed.state;
    if (s.child) {
      view.append(el("p", `${s.child.name ?? s.child.id} lives at ${s.child.permalink}`));
      view.append(image(api.imageUrl(s.child.image.uri)));
      return;
    }
    for (const candidate of s.candidates) {
      const row = el("div", undefined, "candidate");
      row.append(image(api.imageUrl(candidate.imageUri), 48));
      row.append(el("span", candidate.name ?? candidate.ganimalId.slice(0, 8)));
      const selected =
        candidate.ganimalId === s.parentA || candidate.ganimalId === s.parentB;
      const pick = button(selected ? "unpick" : "pick", () => {
        breed.select(candidate.ganimalId);
        renderBreed();
      });
      if (candidate.disabled) {
        pick.setAttribute("disabled", "disabled");
        pick.setAttribute("title", candidate.tooltip ?? "");
      }
      row.append(pick);
      view.append(row);
    }
    const name = document.createElement("input");
    name.placeholder = "name the child";
    name.addEventListener("input", () => breed.setName(name.value));
    view.append(name);
    if (s.validationMessage) view.append(el("p", s.validationMessage, "error"));
    view.append(button("breed", () => breed.submit().then(renderBreed)));
  };

  nav.append(
    button("discover", renderDiscover),
    button("feed", () => feed.poll().then(renderFeed)),
    button("catalogue", () => feed.poll().then(renderCatalogue)),
    button("breed", () => breed.load().then(renderBreed)),
  );

  discover.load().then(renderDiscover);
  setInterval(() => {
    if (view.querySelector(".list, .scatter")) feed.poll().then(renderFeed);
  }, POLL_MS);
}

if (typeof document !== "undefined") {
  const userId =
    localStorage.getItem("ganimals_user") ??
    `visitor-${Math.random().toString(36).slice(2, 10)}`;
  localStorage.setItem("ganimals_user", userId);
  mount(document.getElementById("app")!, new ApiClient(""), userId);
}
