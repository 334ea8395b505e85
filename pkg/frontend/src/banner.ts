const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

/** Non-blocking error strip with a retry button; the rest of the page stays. */
export function renderBanner(message: string): string {
  return `<div class="banner" role="alert">
    <span>${esc(message)}</span>
    <button type="button" data-retry>retry</button>
  </div>`;
}

export function renderNotice(message: string): string {
  return `<div class="banner notice" role="status"><span>${esc(message)}</span></div>`;
}
