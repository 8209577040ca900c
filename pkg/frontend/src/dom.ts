/** Tiny DOM construction helper: `el("div", {class: "x"}, child, "text")`. */

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

/** Explicit failure surface — an API problem must never look like "no data". */
export function errorPanel(cause: unknown): HTMLElement {
  const message = cause instanceof Error
    ? ("label" in cause ? String((cause as { label: unknown }).label) : cause.message)
    : String(cause);
  return el("div", { class: "error-panel", role: "alert" },
    el("strong", {}, "service error"), " — ", message);
}
